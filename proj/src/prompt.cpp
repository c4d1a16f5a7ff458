#include "volbench/prompt.hpp"

#include <fstream>
#include <sstream>

namespace volbench {

namespace {

std::string flatten(const std::string& text) {
    std::string out = text;
    for (char& c : out) {
        if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    }
    return out;
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

}  // namespace

PromptJob render_single(const Headline& headline, const std::string& template_text) {
    static const std::string kPlaceholder = "{HEADLINE}";
    if (count_occurrences(template_text, kPlaceholder) != 1) {
        throw ValidationError("single template must contain exactly one {HEADLINE} placeholder");
    }
    std::size_t pos = template_text.find(kPlaceholder);
    PromptJob job;
    job.style = PromptStyle::Single;
    job.headline_ids = {headline.id};
    job.prompt_text = template_text.substr(0, pos) + flatten(headline.text) +
                      template_text.substr(pos + kPlaceholder.size());
    return job;
}

std::vector<PromptJob> render_batch(const std::vector<Headline>& headlines,
                                    const std::string& template_text, std::size_t batch_size) {
    static const std::string kPlaceholder = "{HEADLINES}";
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (count_occurrences(template_text, kPlaceholder) != 1) {
        throw ValidationError("batch template must contain exactly one {HEADLINES} placeholder");
    }
    std::size_t pos = template_text.find(kPlaceholder);
    std::vector<PromptJob> jobs;
    for (std::size_t start = 0; start < headlines.size(); start += batch_size) {
        std::size_t end = std::min(start + batch_size, headlines.size());
        PromptJob job;
        job.style = PromptStyle::Batch;
        std::ostringstream lines;
        for (std::size_t i = start; i < end; ++i) {
            if (i > start) lines << "\n";
            lines << (i - start + 1) << ". " << flatten(headlines[i].text);
            job.headline_ids.push_back(headlines[i].id);
        }
        job.prompt_text = template_text.substr(0, pos) + lines.str() +
                          template_text.substr(pos + kPlaceholder.size());
        jobs.push_back(std::move(job));
    }
    return jobs;
}

std::string load_template(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open template file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string default_single_template() {
    return "<s>[INST] {{ You are a helpful assistant who only replies according to "
           "instructions. Decide the text's sentiment is positive, neutral, or negative. "
           "Indicate your confidence using a float between 0 and 1. Text: {HEADLINE} "
           "(instruction) Please answer in the form of SENTIMENT_LABEL (CONFIDENCE). }} "
           "[/INST]\nAns: ";
}

std::string default_batch_template() {
    return "Decide whether each piece of text's sentiment is positive, neutral, or negative. "
           "Indicate your confidence for each piece using a float number between 0 and 1.\n"
           "Text:\n{HEADLINES}\nSentiment for each(label and score only):";
}

}  // namespace volbench
