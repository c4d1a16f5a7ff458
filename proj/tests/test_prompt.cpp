#include <doctest.h>

#include "volbench/parser.hpp"
#include "volbench/prompt.hpp"

using namespace volbench;

namespace {

Headline make_headline(const std::string& id, const std::string& text) {
    Headline h;
    h.id = id;
    h.text = text;
    return h;
}

std::vector<Headline> numbered_headlines(std::size_t n) {
    std::vector<Headline> hs;
    for (std::size_t i = 0; i < n; ++i) {
        hs.push_back(make_headline("id" + std::to_string(i), "headline " + std::to_string(i)));
    }
    return hs;
}

}  // namespace

TEST_CASE("single substitution is verbatim") {
    auto job = render_single(make_headline("h1", "x"), "A {HEADLINE} B");
    CHECK(job.prompt_text == "A x B");
    CHECK(job.headline_ids == std::vector<std::string>{"h1"});
    CHECK(job.style == PromptStyle::Single);
}

TEST_CASE("default single template wraps with INST and Ans") {
    auto job = render_single(make_headline("h1", "Apple beats estimates"),
                             default_single_template());
    CHECK(job.prompt_text.find("[INST]") != std::string::npos);
    CHECK(job.prompt_text.find("[/INST]") != std::string::npos);
    CHECK(job.prompt_text.find("Apple beats estimates") != std::string::npos);
    CHECK(job.prompt_text.find("Ans:") != std::string::npos);
}

TEST_CASE("missing placeholder is a template error") {
    CHECK_THROWS_AS(render_single(make_headline("h1", "x"), "no placeholder"), ValidationError);
    CHECK_THROWS_AS(render_single(make_headline("h1", "x"), "{HEADLINE} twice {HEADLINE}"),
                    ValidationError);
}

TEST_CASE("headline containing the placeholder literal is substituted once") {
    auto job = render_single(make_headline("h1", "literal {HEADLINE} inside"), "A {HEADLINE} B");
    CHECK(job.prompt_text == "A literal {HEADLINE} inside B");
}

TEST_CASE("batch chunking: 120 headlines at batch 50 gives 50/50/20") {
    auto jobs = render_batch(numbered_headlines(120), default_batch_template(), 50);
    REQUIRE(jobs.size() == 3);
    CHECK(jobs[0].headline_ids.size() == 50);
    CHECK(jobs[1].headline_ids.size() == 50);
    CHECK(jobs[2].headline_ids.size() == 20);
    CHECK(jobs[0].prompt_text.find("50. headline 49") != std::string::npos);
    CHECK(jobs[2].prompt_text.find("20. headline 119") != std::string::npos);
    for (const auto& j : jobs) {
        CHECK(j.prompt_text.find("Sentiment for each(label and score only):") !=
              std::string::npos);
    }
}

TEST_CASE("smallest batch renders a single numbered line") {
    auto jobs = render_batch(numbered_headlines(1), default_batch_template(), 50);
    REQUIRE(jobs.size() == 1);
    CHECK(jobs[0].prompt_text.find("1. headline 0") != std::string::npos);
}

TEST_CASE("empty headline list yields no jobs") {
    CHECK(render_batch({}, default_batch_template(), 50).empty());
}

TEST_CASE("newlines in headlines are flattened so index lines stay parseable") {
    std::vector<Headline> hs = {make_headline("a", "line one\nline two"),
                                make_headline("b", "plain")};
    auto jobs = render_batch(hs, default_batch_template(), 50);
    REQUIRE(jobs.size() == 1);
    CHECK(jobs[0].prompt_text.find("1. line one line two\n2. plain") != std::string::npos);
}

TEST_CASE("rendering is deterministic") {
    auto hs = numbered_headlines(7);
    auto a = render_batch(hs, default_batch_template(), 3);
    auto b = render_batch(hs, default_batch_template(), 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].prompt_text == b[i].prompt_text);
}

TEST_CASE("round-trip: numbered lines recover headline ids in order") {
    // Random-ish texts including punctuation; parse back via split_batch.
    std::vector<Headline> hs;
    for (int i = 0; i < 23; ++i) {
        hs.push_back(make_headline("id" + std::to_string(i),
                                   "Company " + std::to_string(i * 7) + " says: growth, risk."));
    }
    auto jobs = render_batch(hs, default_batch_template(), 10);
    std::size_t offset = 0;
    for (const auto& job : jobs) {
        // Extract the numbered block back out of the prompt.
        auto start = job.prompt_text.find("Text:\n") + 6;
        auto end = job.prompt_text.rfind("\nSentiment for each");
        std::string block = job.prompt_text.substr(start, end - start);
        auto fragments = split_batch(block, job.headline_ids);
        for (std::size_t i = 0; i < job.headline_ids.size(); ++i) {
            CHECK(fragments.at(job.headline_ids[i]) == hs[offset + i].text);
        }
        offset += job.headline_ids.size();
    }
}
