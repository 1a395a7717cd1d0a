#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dekant {

inline constexpr std::size_t kNumTokens = 22;
inline constexpr std::size_t kNumStates = 5;

// Order is frozen: it indexes emission rows and the corpus/model files.
enum class IslToken : unsigned char {
  input, var, sanit_f, ss, typechk_str, typechk_num, contentchk, fillchk, cond,
  join_str, erase_str, replace_str, split_str, add_str, sub_str, sub_str_replace,
  char5, char6, start_where, conc, var_vv, miss
};

// Order is frozen: matrix columns and argmax tie-breaks follow it.
enum class HmmState : unsigned char { Taint, NTaint, San, Val, ChgStr };

inline constexpr std::size_t index_of(IslToken t) { return static_cast<std::size_t>(t); }
inline constexpr std::size_t index_of(HmmState s) { return static_cast<std::size_t>(s); }

std::string_view name_of(IslToken t);
std::string_view name_of(HmmState s);
// Accepts the typechk_int alias.
std::optional<IslToken> parse_token(std::string_view text);
std::optional<HmmState> parse_state(std::string_view text);

const std::array<IslToken, kNumTokens>& all_tokens();
const std::array<HmmState, kNumStates>& all_states();

bool can_emit(HmmState s, IslToken t);
inline bool is_final_state(HmmState s) { return s == HmmState::Taint || s == HmmState::NTaint; }

enum class VulnClass : unsigned char { SQLI, XSS, RFI, LFI, OSCI, PHPCI, LDAPI, DTPT, SCD, CS, HI, SF };
inline constexpr std::size_t kNumClasses = 12;

const std::array<VulnClass, kNumClasses>& all_classes();
std::string_view label_of(VulnClass c);   // "SQLI", "DT/PT", ...
std::string_view suffix_of(VulnClass c);  // "sqli", "dtpt", ... as in ss_<suffix>.cfg
std::optional<VulnClass> parse_class(std::string_view text);

struct SourceLoc {
  std::string file;
  int line = 0;
  int col = 0;
};

inline constexpr std::string_view kNoName = "-";

struct VarMapEntry {
  bool is_assignment = false;
  std::vector<std::string> names;
};

struct IslInstruction {
  std::vector<IslToken> tokens;
  VarMapEntry varmap;
  // Superglobal access key per token ("_POST[name]") for input tokens; empty elsewhere.
  std::vector<std::string> input_keys;
  SourceLoc loc;
};

struct SliceIsl {
  std::vector<IslInstruction> instructions;
  VulnClass sink_class = VulnClass::SQLI;
  std::string origin;
  int entry_line = 0;
  int sink_line = 0;
  std::string sink;
};

bool validate_sequence(std::span<const IslToken> tokens);

std::string join_tokens(std::span<const IslToken> tokens);
// "1 - q r"
std::string render_varmap(const VarMapEntry& entry);

}  // namespace dekant
