#include "kernelcur/sft.hpp"

#include <cctype>

#include "kernelcur/error.hpp"

namespace kernelcur::sft {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Walks `text`, calling on_literal for plain spans and on_name for each
// placeholder. Returns nothing; callers accumulate.
template <typename Literal, typename Name>
void scan(const std::string& text, Literal on_literal, Name on_name) {
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t dollar = text.find('$', i);
        if (dollar == std::string::npos) {
            on_literal(std::string_view(text).substr(i));
            return;
        }
        on_literal(std::string_view(text).substr(i, dollar - i));
        const std::size_t next = dollar + 1;
        if (next < text.size() && text[next] == '$') {
            on_literal("$");
            i = next + 1;
        } else if (next < text.size() && text[next] == '{') {
            const std::size_t close = text.find('}', next);
            if (close == std::string::npos) {
                on_literal(std::string_view(text).substr(dollar));
                return;
            }
            on_name(text.substr(next + 1, close - next - 1),
                    std::string_view(text).substr(dollar, close + 1 - dollar));
            i = close + 1;
        } else if (next < text.size() && is_ident_start(text[next])) {
            std::size_t end = next;
            while (end < text.size() && is_ident(text[end])) ++end;
            on_name(text.substr(next, end - next),
                    std::string_view(text).substr(dollar, end - dollar));
            i = end;
        } else {
            on_literal("$");
            i = next;
        }
    }
}

}  // namespace

std::map<std::string, int> placeholder_counts(const std::string& text) {
    std::map<std::string, int> counts;
    scan(text, [](std::string_view) {}, [&](const std::string& name, std::string_view) {
        ++counts[name];
    });
    return counts;
}

std::string substitute(const std::string& text, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(text.size());
    scan(text, [&](std::string_view lit) { out += lit; },
         [&](const std::string& name, std::string_view raw) {
             auto it = values.find(name);
             if (it == values.end()) {
                 out += raw;
             } else {
                 out += it->second;
             }
         });
    return out;
}

void PromptTemplate::validate() const {
    const auto counts = placeholder_counts(text);
    for (const char* name : {kTorchExample, kKernelExample, kCode}) {
        auto it = counts.find(name);
        const int n = it == counts.end() ? 0 : it->second;
        if (n == 0) {
            throw ValidationError(std::string("prompt template is missing placeholder $") + name);
        }
        if (n > 1) {
            throw ValidationError(std::string("prompt template repeats placeholder $") + name);
        }
    }
}

std::string PromptTemplate::render(const std::string& code) const {
    validate();
    return substitute(text, {{kTorchExample, few_shot_torch},
                             {kKernelExample, few_shot_kernel},
                             {kCode, code}});
}

std::vector<SftExample> export_sft(const std::vector<curation::CuratedSample>& samples,
                                   const std::map<RecordKey, const GenerationRecord*>& records,
                                   const PromptTemplate& tmpl, const ResponseFormat& format) {
    tmpl.validate();
    std::vector<SftExample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        auto it = records.find(s.key());
        if (it == records.end() || it->second == nullptr) {
            throw ValidationError("curated sample " + to_string(s.key()) + " has no record");
        }
        const GenerationRecord& r = *it->second;
        SftExample ex;
        ex.prompt = tmpl.render(r.task_source);
        if (!r.reasoning_trace.empty()) {
            ex.response = format.think_open + r.reasoning_trace + format.think_close;
        }
        ex.response += r.kernel_source;
        out.push_back(std::move(ex));
    }
    return out;
}

std::string format_sft(const std::vector<SftExample>& examples) {
    std::string out;
    for (const auto& ex : examples) {
        OrderedJson j;
        j["prompt"] = ex.prompt;
        j["response"] = ex.response;
        j["loss_on"] = ex.loss_on;
        out += dump_line(j);
        out += '\n';
    }
    return out;
}

}  // namespace kernelcur::sft
