#include "cha/prompts.hpp"

#include <fstream>
#include <sstream>

#include "cha/error.hpp"

namespace cha {

namespace {

constexpr std::string_view kToolPreamble =
    "As a knowledgeable and empathetic health assistant, your primary objective is to provide "
    "the user with precise and valuable information regarding their health and well-being. "
    "Utilize the available tools effectively to answer health-related queries. Here are the "
    "tools at your disposal:\n"
    "\n"
    "-----------------------------------\n"
    "\n"
    "{{tools}}\n"
    "The following is the format of the information provided:\n"
    "MetaData: This contains the names of data files of different types, such as images, audio, "
    "video, and text. You can pass these files to tools when needed.\n"
    "\n"
    "History: The history of previous chats happened. Review the history of any previous "
    "responses relevant to the current query.\n"
    "\n"
    "PreviousActions: the list of actions that have already been performed. You should start "
    "planning, knowing that these actions are performed.\n"
    "\n"
    "Question: The input question that you must answer.\n"
    "\n";

constexpr std::string_view kContextFrame =
    "Begin!\n"
    "\n"
    "=========================\n"
    "\n"
    "MetaData: {{metadata}}\n"
    "\n"
    "=========================\n"
    "\n"
    "History: {{history}}\n"
    "\n"
    "=========================\n"
    "\n"
    "PreviousActions: {{previous_actions}}\n"
    "\n"
    "=========================\n"
    "\n"
    "USER: {{question}} \n"
    "\n"
    "CHA:";

constexpr std::string_view kStage1Instructions =
    "Considering previously actions and their results, use the tools and provided information, "
    "first suggest three creative strategies with detailed explanation consisting of sequences "
    "of tools to properly answer the user query. Make sure the strategies are comprehensive "
    "enough and use proper tools. The tools constraints should be always satisfied. After "
    "specifying the strategies, mention the pros and cons of each strategy. In the end, decide "
    "the best strategy and write the detailed tool executions step by step. start your final "
    "decision with\n"
    "\n"
    "'Decision:'.\n"
    "\n"
    "If the PreviousActions and History already contain enough information to answer the "
    "question, do not suggest strategies. Instead, write a line starting with 'Final Answer:' "
    "followed by a short summary of the gathered information.\n"
    "\n";

constexpr std::string_view kStage2 =
    "Decision:\n"
    "\n"
    "{{decision}}\n"
    "\n"
    "=========================\n"
    "\n"
    "Tools:\n"
    "\n"
    "-----------------------------------\n"
    "\n"
    "{{tools}}\n"
    "=========================\n"
    "\n"
    "You are a skilled Python programmer who can solve problems and convert them into Python "
    "codes. Using the selected final strategy mentioned in the 'Decision:\n"
    "', create a python code inside a ```python ``` block that outlines a sequence of steps "
    "using the Tools. Assume that there is a **self.execute_task** function that can execute "
    "the tools in it. The execute_task receives the task name and an array of the inputs and "
    "returns the result. Make sure that you always pass an array as a second argument. You can "
    "call tools like this: **task_result = self.execute_task('tool_name', ['input1', 'input2', "
    "...])**. The flow should utilize this style to represent the tools available. Make sure "
    "all the execute_task calls outputs are stored in a variable. If a step's output is "
    "required as input for a subsequent step, ensure the Python code captures this dependency "
    "clearly. The output variables should be directly passed as inputs with no changes in the "
    "wording.\n"
    "If the tool input is a datapipe, only put the variable as the input. For each tool, "
    "include necessary parameters directly without any names and assume each will return an "
    "output. The outputs' description are provided for each tool individually. Make sure you "
    "use the directives when passing the outputs.\n"
    "\n"
    "Question: {{question}}";

constexpr std::string_view kRepair =
    "{{stage2_prompt}}\n"
    "\n"
    "=========================\n"
    "\n"
    "The code you generated previously could not be executed:\n"
    "\n"
    "{{code}}\n"
    "\n"
    "Error: {{error}}\n"
    "\n"
    "Fix the code using only the allowed form and return it inside a ```python ``` block.";

constexpr std::string_view kReactInstructions =
    "Use the following format:\n"
    "\n"
    "Thought: think about what to do next, considering the previous actions and their results\n"
    "Action: the tool to use, exactly one of [{{tool_names}}]\n"
    "Action Input: the inputs of the tool as a JSON list of strings, for example "
    "[\"input1\", \"input2\"]\n"
    "\n"
    "When the gathered information is enough to answer the question, reply instead with:\n"
    "\n"
    "Thought: I now have the information needed\n"
    "Final Answer: a short summary of the gathered information\n"
    "\n"
    "Reply with one Thought followed by either one Action and its Action Input, or a Final "
    "Answer.\n"
    "\n";

constexpr std::string_view kThinker =
    "===========Thinker: \n"
    "\n"
    "MetaData: {{metadata}}\n"
    "\n"
    "History: {{history}}\n"
    "\n"
    "{{actions}}==========\n"
    "\n"
    "System: {{prefix}}. {{directive}}User: {{question}}";

constexpr std::string_view kThinkerDirective =
    "You are a very helpful, empathetic health assistant, and your goal is to help the user get "
    "accurate information about his/her health and well-being; using the Thinker gathered "
    "information and the History, Provide an empathetic, proper answer to the user. Consider "
    "Thinker as your trusted source, and use whatever it provides. Make sure that the answer is "
    "explanatory enough. Don't change Thinker returned URLs or references. Also, add "
    "explanations based on instructions from the Thinker. Don't directly put the instructions "
    "in the final answer to the user. Never answer outside of the Thinker's provided "
    "information. Additionally, refrain from including or using any keys, such as "
    "'datapipe:6d808840-1fbe-45a5-859a-abfbfee93d0e,' in your final response. Return all "
    "`address:[path]` exactly as they are.";

PromptTemplates make_defaults() {
  PromptTemplates t;
  t.set(std::string(PromptTemplates::kStage1),
        std::string(kToolPreamble) + std::string(kStage1Instructions) + std::string(kContextFrame));
  t.set(std::string(PromptTemplates::kStage2), std::string(kStage2));
  t.set(std::string(PromptTemplates::kRepair), std::string(kRepair));
  t.set(std::string(PromptTemplates::kReact),
        std::string(kToolPreamble) + std::string(kReactInstructions) + std::string(kContextFrame));
  t.set(std::string(PromptTemplates::kThinker), std::string(kThinker));
  t.set(std::string(PromptTemplates::kThinkerDirective), std::string(kThinkerDirective));
  return t;
}

}  // namespace

const PromptTemplates& PromptTemplates::defaults() {
  static const PromptTemplates instance = make_defaults();
  return instance;
}

PromptTemplates PromptTemplates::with_overrides(const std::filesystem::path& dir) {
  PromptTemplates t = defaults();
  for (const auto& [name, text] : defaults().templates_) {
    const auto file = dir / (name + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file);
    std::stringstream buf;
    buf << in.rdbuf();
    t.set(name, buf.str());
  }
  const auto& directive = t.get(kThinkerDirective);
  for (std::string_view clause : {"Consider Thinker as your trusted source",
                                  "refrain from including or using any keys"}) {
    if (directive.find(clause) == std::string::npos) {
      throw Error(Errc::ConfigError,
                  "thinker_directive override must keep the clause '" + std::string(clause) + "'");
    }
  }
  return t;
}

const std::string& PromptTemplates::get(std::string_view name) const {
  const auto it = templates_.find(name);
  if (it == templates_.end()) throw Error(Errc::NotFound, "no prompt template '" + std::string(name) + "'");
  return it->second;
}

void PromptTemplates::set(std::string name, std::string text) { templates_[std::move(name)] = std::move(text); }

std::string fill(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(tmpl.size() * 2);
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    const auto key = tmpl.substr(open + 2, close - open - 2);
    if (const auto it = values.find(key); it != values.end()) {
      out += it->second;
    } else {
      out.append(tmpl.substr(open, close + 2 - open));
    }
    pos = close + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

}  // namespace cha
