#pragma once

#include <string>
#include <vector>

#include "volbench/corpus.hpp"

namespace volbench {

enum class PromptStyle { Single, Batch };

/// A rendered prompt plus the bookkeeping needed to route responses back to
/// headlines: numbered line i of a batch prompt corresponds to
/// headline_ids[i-1].
struct PromptJob {
    std::string prompt_text;
    std::vector<std::string> headline_ids;
    PromptStyle style = PromptStyle::Single;
};

/// Substitutes the template's single `{HEADLINE}` placeholder with the
/// headline text (newlines flattened to spaces). Single-pass: a literal
/// "{HEADLINE}" inside the headline text is left alone.
PromptJob render_single(const Headline& headline, const std::string& template_text);

/// Chunks headlines in order into batches of `batch_size` and substitutes the
/// template's `{HEADLINES}` placeholder with lines "1. <text>" .. "n. <text>".
/// The final chunk may be short; an empty input yields no jobs.
std::vector<PromptJob> render_batch(const std::vector<Headline>& headlines,
                                    const std::string& template_text, std::size_t batch_size = 50);

std::string load_template(const std::string& path);

/// Built-in default templates, also shipped under templates/.
std::string default_single_template();
std::string default_batch_template();

}  // namespace volbench
