#pragma once

#include <map>
#include <string>

namespace pragtune {

// Role prompt templates plus per-backend knowledge snippets. Templates carry
// {placeholder} fields; unknown placeholders are left untouched.
class PromptLibrary {
 public:
  // Built-in templates, identical to the files shipped under prompts/.
  static PromptLibrary builtin();

  // Loads <dir>/{router,specialist,arbitrator,critic}.txt and
  // <dir>/knowledge/{merlin,vitis,stratus}.txt; anything missing falls back
  // to the built-in text.
  static PromptLibrary load(const std::string& dir);

  const std::string& role_template(const std::string& role) const;
  const std::string& knowledge(const std::string& backend) const;

  static std::string render(const std::string& tmpl,
                            const std::map<std::string, std::string>& fields);

 private:
  std::map<std::string, std::string> templates_;
  std::map<std::string, std::string> knowledge_;
};

}  // namespace pragtune
