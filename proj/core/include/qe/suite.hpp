#pragma once

#include <string>
#include <vector>

#include "qe/ppwave.hpp"
#include "qe/report.hpp"

namespace qe {

struct CorpusEntry {
  std::string name;    // file stem
  std::string source;  // raw document text
  MetricDocument doc;
};

/// Reads every *.qe file in a directory, sorted by filename.
std::vector<CorpusEntry> load_corpus(const std::string& dir);

/// Builds the metric a document describes (explicit block or wave profile).
MetricField metric_from_document(const MetricDocument& doc);

/// Deterministic per-chart sample point used by suite checks.
NumericPoint sample_point(const Chart& chart);

/// Runs the whole verification battery over the corpus: calibration
/// against the closed forms, classical identities, the quasi-Einstein
/// identity chain, classification suites, conformal rules, the
/// randomized closed-form cross-check, the solvability equivalence, the
/// divergence-formula adjudication, and the negative controls.
VerificationReport run_suite(const std::vector<CorpusEntry>& corpus,
                             std::uint64_t seed);

}  // namespace qe
