#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kernelcur/curation.hpp"
#include "kernelcur/records.hpp"

namespace kernelcur::sft {

// A `$name` / `${name}` template with `$$` as a literal dollar, plus the
// fixed few-shot pair rendered into every prompt.
struct PromptTemplate {
    std::string text;
    std::string few_shot_torch;
    std::string few_shot_kernel;

    static constexpr const char* kTorchExample = "ref_arch_torch";
    static constexpr const char* kKernelExample = "ref_arch_kernel";
    static constexpr const char* kCode = "code";

    static PromptTemplate builtin();

    // Throws ValidationError naming the first placeholder that is missing or repeated.
    void validate() const;

    std::string render(const std::string& code) const;
};

// Counts of each `$name` occurrence in `text`, skipping `$$` escapes.
std::map<std::string, int> placeholder_counts(const std::string& text);

// Substitutes known names; unknown `$name` sequences pass through unchanged.
std::string substitute(const std::string& text, const std::map<std::string, std::string>& values);

struct ResponseFormat {
    std::string think_open = "<think>\n";
    std::string think_close = "\n</think>\n\n";
};

struct SftExample {
    std::string prompt;
    std::string response;
    std::string loss_on = "response";
};

// Prompt from the task source, response = delimited reasoning followed by the
// kernel. An empty trace yields the kernel alone without delimiters.
std::vector<SftExample> export_sft(const std::vector<curation::CuratedSample>& samples,
                                   const std::map<RecordKey, const GenerationRecord*>& records,
                                   const PromptTemplate& tmpl, const ResponseFormat& format = {});

std::string format_sft(const std::vector<SftExample>& examples);

}  // namespace kernelcur::sft
