#pragma once
#ifndef CHAINAUDIT_TESTS_ORACLES_HPP
#define CHAINAUDIT_TESTS_ORACLES_HPP

// Fixture builders and brute-force reference checkers shared by the unit
// tests and the acceptance runner. The reference checkers are written
// independently of the library: ASCII-only tokenizing and normalization, a
// textbook LCS table, and exhaustive path enumeration.

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainaudit/audit/attribution.hpp"
#include "chainaudit/audit/integrity.hpp"
#include "chainaudit/audit/scan.hpp"
#include "chainaudit/graph/snapshot.hpp"
#include "chainaudit/graph/supply_graph.hpp"
#include "chainaudit/license/labels.hpp"
#include "chainaudit/license/matcher.hpp"
#include "chainaudit/retrieval/patterns.hpp"

namespace chainaudit::oracle {

using graph::ArtifactKind;
using graph::NodeKey;

// Reference text handling

inline bool ascii_alnum(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline char ascii_lower(char c)
{
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::vector<std::string> ascii_tokens(std::string_view s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (ascii_alnum(c)) {
            cur += ascii_lower(c);
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::string ascii_normalize(std::string_view s)
{
    std::string out;
    for (char c : s) {
        if (ascii_alnum(c)) out += ascii_lower(c);
    }
    return out;
}

inline std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

/// Template tokens: text before the Apache appendix, same-line <placeholders> removed.
inline std::vector<std::string> template_tokens(std::string text)
{
    if (auto pos = text.find("APPENDIX: How to apply the Apache License"); pos != std::string::npos) {
        text.resize(pos);
    }
    static const std::regex placeholder("<[^>\n]*>");
    return ascii_tokens(std::regex_replace(text, placeholder, " "));
}

inline double coverage(std::string_view document, const std::vector<std::string>& tmpl)
{
    return static_cast<double>(lcs_length(ascii_tokens(document), tmpl)) / static_cast<double>(tmpl.size());
}

// Shipped data

inline const license::TemplateCorpus& corpus()
{
    static const license::TemplateCorpus c = license::load_template_corpus(default_data_dir() / "templates");
    return c;
}

inline const license::LabelTables& tables()
{
    static const license::LabelTables t = license::LabelTables::load_defaults();
    return t;
}

inline const std::string& template_text(std::string_view spdx)
{
    const auto* t = license::find_template(corpus(), spdx);
    if (!t) throw Error("no shipped template " + std::string(spdx));
    return t->canonical_text;
}

/// Words joined with a line break every twelve words.
inline std::string reflow(const std::vector<std::string>& words)
{
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        out += words[i];
        out += (i + 1) % 12 == 0 ? '\n' : ' ';
    }
    return out;
}

/// First `keep` tokens of a template as plain text.
inline std::string truncated_template(std::string_view spdx, std::size_t keep)
{
    auto toks = template_tokens(template_text(spdx));
    toks.resize(std::min(keep, toks.size()));
    return reflow(toks);
}

// Artifacts built from file payloads

struct FileSpec {
    std::string path;
    std::string content;
};

struct Payload {
    NodeKey key;
    std::string label;          // as declared
    std::string expected_spdx;  // the label's template, assigned by hand
    bool retrievable = true;
    bool has_notice = false;    // assigned by hand
    std::vector<FileSpec> files;
};

inline audit::ArtifactScan scan_payload(const Payload& p)
{
    std::vector<retrieval::RetrievedFile> files;
    if (p.retrievable) {
        for (const auto& f : p.files) {
            retrieval::RetrievedFile r;
            r.artifact_id = p.key.id;
            r.path = f.path;
            r.file_class = retrieval::classify_path(f.path);
            r.size_bytes = f.content.size();
            r.content = f.content;
            r.content_hash = sha256_hex(f.content);
            files.push_back(std::move(r));
        }
    }
    return audit::scan_artifact(p.key.kind, p.key.id, std::move(files), {}, p.files.empty() ? 1 : p.files.size(),
                                corpus());
}

inline std::string notice_line(std::size_t i)
{
    return "Copyright (c) 2024 Holder " + std::to_string(i);
}

/// Thirty artifacts: ten payload shapes, each under the three permissive
/// labels, spread over the three kinds.
inline std::vector<Payload> integrity_corpus()
{
    const std::vector<std::string> spdx = {"MIT", "Apache-2.0", "BSD-3-Clause"};
    const std::vector<std::string> aliases = {"mit-license", "Apache 2.0", "bsd3"};
    std::vector<Payload> out;
    for (std::size_t i = 0; i < 30; ++i) {
        Payload p;
        const std::size_t shape = i % 10;
        const std::size_t which = (i / 10) % 3;
        p.key = {graph::kAllKinds[i % 3], "org" + std::to_string(i % 4) + "/artifact-" + std::to_string(i)};
        p.expected_spdx = spdx[which];
        p.label = shape == 9 ? aliases[which] : to_lower_ascii(spdx[which]);
        const std::string body = template_text(spdx[which]);
        const std::size_t n = template_tokens(body).size();
        switch (shape) {
            case 0:  // full text with a notice on top
                p.files = {{"LICENSE", notice_line(i) + "\n\n" + body}};
                p.has_notice = true;
                break;
            case 1:  // full text, placeholders left in
                p.files = {{"LICENSE", body}, {"README.md", "# Artifact\n"}};
                break;
            case 2:  // notice in the README only
                p.files = {{"README.md", "# Artifact\n\n" + notice_line(i) + "\n"}};
                p.has_notice = true;
                break;
            case 3:  // 89% of the text
                p.files = {{"LICENSE", truncated_template(spdx[which], n * 89 / 100)}, {"NOTICE", notice_line(i)}};
                p.has_notice = true;
                break;
            case 4:  // just enough of the text
                p.files = {{"LICENSE", truncated_template(spdx[which], (n * 9 + 9) / 10)}, {"NOTICE", notice_line(i)}};
                p.has_notice = true;
                break;
            case 5:  // another license's text
                p.files = {{"LICENSE", notice_line(i) + "\n\n" + template_text(spdx[(which + 1) % 3])}};
                p.has_notice = true;
                break;
            case 6:  // nothing retrievable
                p.retrievable = false;
                p.files = {{"LICENSE", body}};
                break;
            case 7:  // bare README
                p.files = {{"README.md", "# Nothing to see\n"}};
                break;
            case 8:  // text and notice inside the README
                p.files = {{"README.md", "# Artifact\n\n" + body + "\n\n" + notice_line(i) + "\n"}};
                p.has_notice = true;
                break;
            case 9:  // aliased label, notice in a scattered file
                p.files = {{"LICENSE", body}, {"docs/NOTICE.txt", notice_line(i)}};
                p.has_notice = true;
                break;
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct ExpectedVerdict {
    bool license_text = false;
    bool copyright = false;
    bool compliant = false;
    friend bool operator==(const ExpectedVerdict&, const ExpectedVerdict&) = default;
};

/// Direct threshold comparison per artifact.
inline ExpectedVerdict brute_force_integrity(const Payload& p, double threshold = 0.90)
{
    ExpectedVerdict v;
    if (!p.retrievable) return v;
    const auto tmpl = template_tokens(template_text(p.expected_spdx));
    double best = 0.0;
    for (const auto& f : p.files) best = std::max(best, coverage(f.content, tmpl));
    v.license_text = best >= threshold;
    v.copyright = p.has_notice;
    v.compliant = v.license_text && v.copyright;
    return v;
}

/// Integrity audit over a payload set, labels taken verbatim from the payloads.
inline audit::VerdictTable audit_payloads(const std::vector<Payload>& payloads, audit::ScanTable& scans)
{
    std::map<NodeKey, std::string> labels;
    std::vector<NodeKey> keys;
    for (const auto& p : payloads) {
        scans[p.key] = scan_payload(p);
        labels[p.key] = p.label;
        keys.push_back(p.key);
    }
    audit::LabelLookup lookup = [&](const NodeKey& k) -> std::optional<std::string> { return labels.at(k); };
    return audit::integrity_audit(keys, lookup, scans, tables());
}

// Table semantics population

struct DatasetPopulation {
    std::uint64_t total = 0;
    std::uint64_t both = 0;
    std::uint64_t license_only = 0;
    std::uint64_t copyright_only = 0;
};

inline nlohmann::json population_spec()
{
    return nlohmann::json::parse(read_file(std::filesystem::path(CHAINAUDIT_FIXTURES_DIR) / "population" /
                                           "population.json"));
}

inline DatasetPopulation dataset_population_spec()
{
    const auto j = population_spec().at("datasets");
    return {j.at("total"), j.at("license_and_copyright"), j.at("license_only"), j.at("copyright_only")};
}

/// MIT-labeled datasets whose payloads realize the requested group sizes.
inline std::vector<Payload> dataset_population(const DatasetPopulation& spec)
{
    std::vector<Payload> out;
    const std::string mit = template_text("MIT");
    for (std::uint64_t i = 0; i < spec.total; ++i) {
        Payload p;
        p.key = {ArtifactKind::dataset, "pop/dataset-" + std::to_string(i)};
        p.label = "mit";
        p.expected_spdx = "MIT";
        if (i < spec.both) {
            p.files = {{"LICENSE", notice_line(i) + "\n\n" + mit}, {"README.md", "# Data\n"}};
            p.has_notice = true;
        } else if (i < spec.both + spec.license_only) {
            p.files = {{"LICENSE", mit}, {"README.md", "# Data\n"}};
        } else if (i < spec.both + spec.license_only + spec.copyright_only) {
            p.files = {{"README.md", "# Data\n\nLicensed under MIT.\n\n" + notice_line(i) + "\n"}};
            p.has_notice = true;
        } else {
            p.files = {{"README.md", "# Data " + std::to_string(i) + "\n\nLicense: MIT\n"}};
        }
        out.push_back(std::move(p));
    }
    return out;
}

/// Snapshot lines for a model population with the requested tag counts.
inline std::string model_population_snapshot()
{
    const auto j = population_spec().at("models");
    const std::uint64_t total = j.at("total"), datasets = j.at("dataset_tagged"), bases = j.at("base_model_tagged"),
                        liked = j.at("liked");
    std::mt19937 rng(1923);
    std::vector<std::uint64_t> order(total);
    for (std::uint64_t i = 0; i < total; ++i) order[i] = i;
    auto pick = [&](std::uint64_t n) {
        std::shuffle(order.begin(), order.end(), rng);
        return std::set<std::uint64_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
    };
    const auto with_datasets = pick(datasets), with_base = pick(bases), with_likes = pick(liked);
    std::string out;
    for (std::uint64_t i = 0; i < total; ++i) {
        nlohmann::json r{{"id", "pop/model-" + std::to_string(i)}, {"kind", "model"}, {"platform", "hub"},
                         {"engagement", with_likes.count(i) ? 3 : 0}};
        r["datasets"] = with_datasets.count(i) ? nlohmann::json::array({"pop/data"}) : nlohmann::json::array();
        if (with_base.count(i)) r["base_model"] = "pop/base";
        out += r.dump() + "\n";
    }
    out += R"({"id":"pop/data","kind":"dataset","platform":"hub","engagement":1})"
           "\n";
    return out;
}

// Attribution fixtures

struct SliceFixture {
    graph::SupplyGraph g;
    audit::VerdictTable verdicts;
    audit::ScanTable scans;
    std::map<NodeKey, std::vector<std::string>> notices;  // raw notice strings
    std::map<NodeKey, std::string> text;                  // raw downstream text
};

inline graph::ArtifactRecord record(ArtifactKind kind, const std::string& id)
{
    graph::ArtifactRecord r;
    r.id = id;
    r.kind = kind;
    r.platform = kind == ArtifactKind::application ? graph::Platform::forge : graph::Platform::hub;
    r.engagement = 1;
    r.declared_license = "mit";
    return r;
}

/// Inserts punctuation and whitespace at random and flips letter case.
inline std::string disguise(const std::string& s, std::mt19937& rng)
{
    static const std::string noise = " .,;:-_()[]{}\"'!?/\\\n\t*#";
    std::string out;
    for (char c : s) {
        if (rng() % 4 == 0) out += noise[rng() % noise.size()];
        out += rng() % 2 ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
    }
    return out;
}

inline void set_scan(SliceFixture& f, const NodeKey& key)
{
    audit::ArtifactScan s;
    s.kind = key.kind;
    s.id = key.id;
    for (const auto& n : f.notices[key]) s.notices.push_back({n, "", {}, "NOTICE", retrieval::FileClass::root_license});
    s.text = audit::normalize_notice(f.text[key]);
    f.scans[key] = std::move(s);
}

/// Random graph of at most 50 nodes with random compliance, multi-notice
/// upstreams and disguised copies of notices in downstream text.
inline SliceFixture random_slice_fixture(std::mt19937& rng)
{
    SliceFixture f;
    const int nd = 1 + static_cast<int>(rng() % 10), nm = 1 + static_cast<int>(rng() % 20),
              na = 1 + static_cast<int>(rng() % 20);
    std::vector<std::string> d, m, a;
    for (int i = 0; i < nd; ++i) d.push_back("d" + std::to_string(i));
    for (int i = 0; i < nm; ++i) m.push_back("m" + std::to_string(i));
    for (int i = 0; i < na; ++i) a.push_back("a" + std::to_string(i));
    for (const auto& x : d) f.g.add_node(record(ArtifactKind::dataset, x));
    for (const auto& x : m) f.g.add_node(record(ArtifactKind::model, x));
    for (const auto& x : a) f.g.add_node(record(ArtifactKind::application, x));
    for (const auto& x : d)
        for (const auto& y : m)
            if (rng() % 5 == 0) f.g.add_edge({x, y, graph::EdgeType::trained_on});
    for (int i = 0; i < nm; ++i)
        for (int j = i + 1; j < nm; ++j)
            if (rng() % 8 == 0) f.g.add_edge({m[i], m[j], graph::EdgeType::base_of});
    for (const auto& x : m)
        for (const auto& y : a)
            if (rng() % 5 == 0) f.g.add_edge({x, y, graph::EdgeType::used_by});

    std::vector<std::string> pool;
    for (int i = 0; i < 12; ++i) pool.push_back("Copyright " + std::to_string(2010 + i) + " Org" + std::to_string(i));
    pool.push_back("\xC2\xA9 ---");  // normalizes to nothing
    for (const auto& [key, _] : f.g.nodes()) {
        if (key.kind != ArtifactKind::application) {
            const int count = static_cast<int>(rng() % 4);
            for (int i = 0; i < count; ++i) f.notices[key].push_back(pool[rng() % pool.size()]);
            audit::IntegrityVerdict v;
            v.kind = key.kind;
            v.artifact_id = key.id;
            v.has_license_text = v.has_copyright = v.fully_compliant = rng() % 3 != 0;
            f.verdicts[key] = v;
        }
        if (key.kind != ArtifactKind::dataset) {
            std::string text = "header text\n";
            const int copies = static_cast<int>(rng() % 4);
            for (int i = 0; i < copies; ++i) text += disguise(pool[rng() % pool.size()], rng) + "\nfiller\n";
            f.text[key] = text;
        }
        set_scan(f, key);
    }
    return f;
}

/// Reference tallies by exhaustive enumeration and naive substring checks.
struct SliceOracle {
    std::map<std::string, std::set<std::tuple<std::string, std::string, bool, bool>>> links;
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> tally;  // evaluated, preserved
    std::pair<std::uint64_t, std::uint64_t> s2_inherited;
};

inline SliceOracle brute_force_slices(const SliceFixture& f)
{
    const auto& g = f.g;
    auto edge = [&](const std::string& s, const std::string& d, graph::EdgeType t) {
        return g.edges().count({s, d, t}) > 0;
    };
    const auto D = g.ids(ArtifactKind::dataset), M = g.ids(ArtifactKind::model), A = g.ids(ArtifactKind::application);
    std::map<std::pair<std::string, std::string>, bool> reach;
    for (const auto& x : M)
        for (const auto& y : M) reach[{x, y}] = x == y || edge(x, y, graph::EdgeType::base_of);
    for (const auto& k : M)
        for (const auto& i : M)
            for (const auto& j : M)
                if (reach[{i, k}] && reach[{k, j}]) reach[{i, j}] = true;
    auto compliant = [&](ArtifactKind k, const std::string& id) {
        auto it = f.verdicts.find({k, id});
        return it != f.verdicts.end() && it->second.fully_compliant;
    };
    auto preserved = [&](ArtifactKind uk, const std::string& u, ArtifactKind dk, const std::string& d) {
        auto nit = f.notices.find({uk, u});
        auto tit = f.text.find({dk, d});
        if (nit == f.notices.end() || tit == f.text.end()) return false;
        const std::string hay = ascii_normalize(tit->second);
        for (const auto& n : nit->second) {
            const std::string needle = ascii_normalize(n);
            if (!needle.empty() && hay.find(needle) != std::string::npos) return true;
        }
        return false;
    };
    auto feeds = [&](const std::string& ds, const std::string& model) {
        for (const auto& m0 : M)
            if (edge(ds, m0, graph::EdgeType::trained_on) && reach[{m0, model}]) return true;
        return false;
    };
    SliceOracle o;
    auto count = [&](const std::string& s, const std::string& up, const std::string& down, bool kept, bool inh) {
        o.links[s].insert({up, down, kept, inh});
        o.tally[s].first += 1;
        o.tally[s].second += kept;
    };
    for (auto s : {"S1", "S2", "S3", "S4"}) o.tally[s] = {0, 0};
    for (const auto& ds : D)
        for (const auto& model : M)
            if (compliant(ArtifactKind::dataset, ds) && feeds(ds, model))
                count("S1", ds, model, preserved(ArtifactKind::dataset, ds, ArtifactKind::model, model),
                      !edge(ds, model, graph::EdgeType::trained_on));
    for (const auto& model : M) {
        if (!compliant(ArtifactKind::model, model)) continue;
        for (const auto& app : A) {
            const bool kept = preserved(ArtifactKind::model, model, ArtifactKind::application, app);
            if (edge(model, app, graph::EdgeType::used_by)) {
                count("S2", model, app, kept, false);
                continue;
            }
            bool via_descendant = false;
            for (const auto& x : M)
                if (x != model && reach[{model, x}] && edge(x, app, graph::EdgeType::used_by)) via_descendant = true;
            if (via_descendant) {
                o.links["S2"].insert({model, app, kept, true});
                o.s2_inherited.first += 1;
                o.s2_inherited.second += kept;
            }
        }
    }
    for (const auto& app : A) {
        std::set<std::pair<ArtifactKind, std::string>> up;
        std::set<std::pair<std::string, std::string>> joint;
        for (const auto& model : M) {
            if (!edge(model, app, graph::EdgeType::used_by)) continue;
            if (compliant(ArtifactKind::model, model)) up.insert({ArtifactKind::model, model});
            for (const auto& ds : D) {
                if (!compliant(ArtifactKind::dataset, ds) || !feeds(ds, model)) continue;
                up.insert({ArtifactKind::dataset, ds});
                if (compliant(ArtifactKind::model, model)) joint.insert({ds, model});
            }
        }
        if (!up.empty()) {
            bool kept = false;
            for (const auto& [k, id] : up) kept = kept || preserved(k, id, ArtifactKind::application, app);
            o.tally["S3"].first += 1;
            o.tally["S3"].second += kept;
        }
        if (!joint.empty()) {
            bool kept = false;
            for (const auto& [ds, model] : joint)
                kept = kept || (preserved(ArtifactKind::dataset, ds, ArtifactKind::application, app) &&
                                preserved(ArtifactKind::model, model, ArtifactKind::application, app));
            o.tally["S4"].first += 1;
            o.tally["S4"].second += kept;
        }
    }
    return o;
}

/// Compares run_all_slices against the reference; returns a description of
/// the first disagreement, or an empty string.
inline std::string compare_slices(const SliceFixture& f)
{
    const auto results = audit::run_all_slices(f.g, f.verdicts, f.scans);
    const auto o = brute_force_slices(f);
    for (const auto& r : results) {
        const std::string name(audit::to_string(r.slice));
        const auto expected = o.tally.at(name);
        if (r.evaluated != expected.first || r.preserved != expected.second) {
            return name + ": got " + std::to_string(r.evaluated) + "/" + std::to_string(r.preserved) + ", expected " +
                   std::to_string(expected.first) + "/" + std::to_string(expected.second);
        }
        if (name == "S1" || name == "S2") {
            std::set<std::tuple<std::string, std::string, bool, bool>> got;
            for (const auto& l : r.links) got.insert({l.upstream_id, l.downstream_id, l.preserved, l.inherited});
            const auto it = o.links.find(name);
            if (got != (it == o.links.end() ? decltype(got){} : it->second)) return name + ": link sets differ";
        }
        if (name == "S2" && std::make_pair(r.inherited_evaluated, r.inherited_preserved) != o.s2_inherited) {
            return "S2: inherited tallies differ";
        }
    }
    // S4 preserved applications are S3 preserved applications.
    std::set<std::string> s3, s4;
    for (const auto& l : results[2].links)
        if (l.preserved) s3.insert(l.downstream_id);
    for (const auto& l : results[3].links)
        if (l.preserved) s4.insert(l.downstream_id);
    if (!std::includes(s3.begin(), s3.end(), s4.begin(), s4.end())) return "S4 not contained in S3";
    return {};
}

/// Hand-built graphs scanned from real file payloads: the three-node S1
/// example, plus a joint-path case with a two-notice dataset.
struct HandFixture {
    SliceFixture fixture;
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> expected;
};

inline void add_payload(SliceFixture& f, const Payload& p)
{
    f.g.add_node(record(p.key.kind, p.key.id));
    f.scans[p.key] = scan_payload(p);
    std::string text;
    for (const auto& file : p.files) {
        text += file.content;
        for (const auto& n : license::extract_copyrights(file.content)) f.notices[p.key].push_back(n.raw_text);
    }
    f.text[p.key] = text;
}

inline void audit_fixture(SliceFixture& f)
{
    std::vector<NodeKey> keys;
    for (const auto& [k, _] : f.g.nodes()) keys.push_back(k);
    audit::LabelLookup lookup = [&](const NodeKey& k) -> std::optional<std::string> {
        return f.g.node(k.kind, k.id).declared_license;
    };
    f.verdicts = audit::integrity_audit(keys, lookup, f.scans, tables());
}

inline std::vector<HandFixture> hand_fixtures()
{
    const std::string mit = template_text("MIT");
    std::vector<HandFixture> out;
    {
        HandFixture h;
        auto& f = h.fixture;
        add_payload(f, {{ArtifactKind::dataset, "org/data"}, "mit", "MIT", true, true,
                        {{"LICENSE", "Copyright (c) 2023 Data Org\n\n" + mit}}});
        add_payload(f, {{ArtifactKind::model, "org/m1"}, "mit", "MIT", true, false,
                        {{"README.md", "# M1\n\nData notice: Copyright (c) 2023 Data Org.\n"}}});
        add_payload(f, {{ArtifactKind::model, "org/m2"}, "mit", "MIT", true, false, {{"README.md", "# M2\n"}}});
        f.g.add_edge({"org/data", "org/m1", graph::EdgeType::trained_on});
        f.g.add_edge({"org/data", "org/m2", graph::EdgeType::trained_on});
        audit_fixture(f);
        h.expected = {{"S1", {2, 1}}, {"S2", {0, 0}}, {"S3", {0, 0}}, {"S4", {0, 0}}};
        out.push_back(std::move(h));
    }
    {
        HandFixture h;
        auto& f = h.fixture;
        const std::string first = "Copyright (c) 2020 First Holder", second = "Copyright (c) 2021 Second Holder",
                          model_notice = "Copyright 2024 Model Corp";
        add_payload(f, {{ArtifactKind::dataset, "org/data"}, "mit", "MIT", true, true,
                        {{"LICENSE", first + "\n" + second + "\n\n" + mit}}});
        add_payload(f, {{ArtifactKind::model, "org/model"}, "mit", "MIT", true, true,
                        {{"LICENSE", mit}, {"NOTICE", model_notice + "\n"}, {"README.md", "Data: " + second + "\n"}}});
        add_payload(f, {{ArtifactKind::application, "u/both"}, "mit", "MIT", true, false,
                        {{"README.md", "Credits\n- " + second + "\n- " + model_notice + "\n"}}});
        add_payload(f, {{ArtifactKind::application, "u/model-only"}, "mit", "MIT", true, false,
                        {{"README.md", "Credits: " + model_notice + "\n"}}});
        add_payload(f, {{ArtifactKind::application, "u/none"}, "mit", "MIT", true, false, {{"README.md", "# none\n"}}});
        add_payload(f, {{ArtifactKind::application, "u/data-only"}, "mit", "MIT", true, false,
                        {{"README.md", "Credits: " + first + "\n"}}});
        f.g.add_edge({"org/data", "org/model", graph::EdgeType::trained_on});
        for (auto app : {"u/both", "u/model-only", "u/none", "u/data-only"})
            f.g.add_edge({"org/model", app, graph::EdgeType::used_by});
        audit_fixture(f);
        h.expected = {{"S1", {1, 1}}, {"S2", {4, 2}}, {"S3", {4, 3}}, {"S4", {4, 1}}};
        out.push_back(std::move(h));
    }
    return out;
}


// Normalization properties

/// Random text over ASCII letters, digits, punctuation and a few multibyte
/// characters.
inline std::string random_text(std::mt19937& rng, std::size_t max_len)
{
    static const std::vector<std::string> alphabet = {
        "a", "B", "c", "D", "x", "Y", "0", "7", "9", " ", ",", ".", "-", "(", ")", "\n",
        "\xC3\xA9" /* é */, "\xC2\xA9" /* © */, "\xCE\xA9" /* Ω */, "\xE2\x80\x94" /* dash */};
    std::string out;
    const std::size_t n = rng() % (max_len + 1);
    for (std::size_t i = 0; i < n; ++i) out += alphabet[rng() % alphabet.size()];
    return out;
}

/// Inserts ASCII punctuation or whitespace between characters, keeping
/// multibyte sequences intact.
inline std::string sprinkle(const std::string& s, std::mt19937& rng)
{
    static const std::string noise = " \t\n.,;:-_()[]!?/'\"";
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool boundary = (static_cast<unsigned char>(s[i]) & 0xC0) != 0x80;
        if (boundary && rng() % 3 == 0) out += noise[rng() % noise.size()];
        out += s[i];
    }
    return out;
}

/// Reference normalization over the random_text alphabet: ASCII alnum
/// lowercased, é kept, Ω lowered to ω, everything else dropped.
inline std::string table_normalize(std::string_view s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size();) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (c < 0x80) {
            if (ascii_alnum(s[i])) out += ascii_lower(s[i]);
            ++i;
            continue;
        }
        const std::size_t len = c >= 0xE0 ? 3 : 2;
        const auto seq = s.substr(i, len);
        if (seq == "\xC3\xA9") out += seq;
        if (seq == "\xCE\xA9") out += "\xCF\x89";
        i += len;
    }
    return out;
}

/// Idempotence, agreement with the ASCII reference, punctuation-insertion
/// invariance and "(c)" sensitivity over `cases` random inputs. Returns the
/// first failure, or an empty string.
inline std::string check_normalization_properties(std::size_t cases, unsigned seed)
{
    std::mt19937 rng(seed);
    for (std::size_t i = 0; i < cases; ++i) {
        const std::string x = random_text(rng, 40);
        const std::string nx = audit::normalize_notice(x);
        if (audit::normalize_notice(nx) != nx) return "not idempotent on case " + std::to_string(i);
        if (nx != table_normalize(x)) return "character-class table disagrees on case " + std::to_string(i);

        const std::string holder = "Holder" + std::to_string(rng() % 1000);
        const std::string notice = "Copyright " + std::to_string(1990 + rng() % 35) + " " + holder;
        std::string down = random_text(rng, 30);
        if (rng() % 2) down += notice;
        down += random_text(rng, 30);
        const bool base = audit::attribution_preserved(notice, down);
        const bool expected = table_normalize(down).find(table_normalize(notice)) != std::string::npos;
        if (base != expected) return "substring reference disagrees on case " + std::to_string(i);
        if (audit::attribution_preserved(sprinkle(notice, rng), sprinkle(down, rng)) != base)
            return "punctuation insertion changed the verdict on case " + std::to_string(i);

        const std::string year = std::to_string(2000 + rng() % 25);
        if (audit::attribution_preserved("Copyright (c) " + year + " " + holder, "Copyright " + year + " " + holder))
            return "(c) dropped from the notice matched on case " + std::to_string(i);
        if (!audit::attribution_preserved("Copyright (c) " + year + " " + holder,
                                          "x COPYRIGHT (C) " + year + ", " + holder + "."))
            return "(c) kept in the downstream did not match on case " + std::to_string(i);
    }
    return {};
}

}  // namespace chainaudit::oracle

#endif  // CHAINAUDIT_TESTS_ORACLES_HPP
