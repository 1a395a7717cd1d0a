#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dekant/php/ast.hpp"
#include "dekant/token_config.hpp"

// Helpers shared by the slicer and the translator so both agree on what a
// call means and which of its arguments carry data.
namespace dekant {

bool is_call(const php::Expr& e);

// Arguments without the receiver of a method call.
std::span<const php::Expr> call_args(const php::Expr& call);

// Configured meaning of a call; method calls resolve through the mysqli classes.
const FunctionSpec* lookup_call(const php::Expr& call, const TokenConfig& config);

// Display name of the called function ("mysqli_query", "mysqli::query", ...).
std::string call_name(const php::Expr& call, const TokenConfig& config);

// Indices of arguments that flow into the result. The string-modifying tokens
// have fixed PHP signatures; everything else follows the configured positions.
std::vector<std::size_t> data_args(const php::Expr& call, const TokenConfig& config);

// $_GET, $_POST['k'], $_FILES['f']['name'], ...
bool is_input_access(const php::Expr& e, const TokenConfig& config);
// "_POST[name]" for an input access, "_POST" when the key is not literal.
std::string input_key(const php::Expr& e);

// Name tracked for a variable-like expression; arrays are tracked as a whole.
std::optional<std::string> tracked_name(const php::Expr& e);
// Assignment to a plain variable or property replaces its taint.
bool is_strong_target(const php::Expr& e);

bool is_concat(const php::Expr& e);
bool is_logical(const php::Expr& e);

}  // namespace dekant
