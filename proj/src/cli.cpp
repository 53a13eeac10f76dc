#include "ontoeval/cli.hpp"

#include "ontoeval/agreement.hpp"
#include "ontoeval/backend.hpp"
#include "ontoeval/error.hpp"
#include "ontoeval/manifest.hpp"
#include "ontoeval/merge.hpp"
#include "ontoeval/metrics.hpp"
#include "ontoeval/ontology.hpp"
#include "ontoeval/pairs.hpp"
#include "ontoeval/rdfxml_writer.hpp"
#include "ontoeval/report.hpp"
#include "ontoeval/server.hpp"
#include "ontoeval/taxonomy.hpp"
#include "ontoeval/validator.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <ostream>

namespace ontoeval::cli {

namespace {

namespace fs = std::filesystem;

struct Common {
    bool pretty = false;
    std::string out_dir;
    std::string prefixes;
};

void add_common(CLI::App* cmd, Common& c, bool with_prefixes = true)
{
    cmd->add_flag("--pretty", c.pretty, "Indent JSON output");
    cmd->add_option("--out", c.out_dir, "Directory for artifacts and manifest.json");
    if (with_prefixes) cmd->add_option("--prefixes", c.prefixes, "JSON prefix map (prefix -> namespace)");
}

class Session {
public:
    Session(std::string command, const std::vector<std::string>& args, const Common& common, std::ostream& out)
        : common_(common), out_(out)
    {
        manifest_.command = std::move(command);
        manifest_.arguments = args;
        manifest_.started_at = utc_now();
        if (!common_.out_dir.empty()) fs::create_directories(common_.out_dir);
    }

    RunManifest& manifest() { return manifest_; }

    PrefixMap prefixes()
    {
        if (common_.prefixes.empty()) return standard_prefixes();
        manifest_.add_input(common_.prefixes);
        return load_prefix_map(common_.prefixes);
    }

    OntologyModel load(const std::string& path, BuildDiagnostics* diag = nullptr)
    {
        manifest_.add_input(path);
        return load_ontology(path, prefixes(), diag);
    }

    std::string artifact(const std::string& name) const { return (fs::path(common_.out_dir) / name).string(); }
    bool has_out() const { return !common_.out_dir.empty(); }

    void write_artifact(const std::string& name, const std::string& data)
    {
        const auto path = artifact(name);
        write_file_atomic(path, data);
        manifest_.add_output(path);
    }

    /// Writes manifest.json when --out was given.
    bool save_manifest()
    {
        manifest_.finished_at = utc_now();
        if (!has_out()) return false;
        write_file_atomic(artifact("manifest.json"), to_json(manifest_).dump(2) + "\n");
        return true;
    }

    /// Prints the report; the manifest is written to --out or embedded.
    void emit(nlohmann::json report)
    {
        if (save_manifest()) {
            report["manifest_path"] = artifact("manifest.json");
        } else {
            report["manifest"] = to_json(manifest_);
        }
        out_ << report.dump(common_.pretty ? 2 : -1) << '\n';
    }

private:
    Common common_;
    std::ostream& out_;
    RunManifest manifest_;
};

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const BackendError*>(&e)) return kBackendError;
    return kInputError;
}

ProtocolConfig load_protocol(const std::string& path, RunManifest& manifest)
{
    if (path.empty()) return {};
    manifest.add_input(path);
    try {
        return protocol_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("protocol file " + path + " is not valid JSON: " + e.what());
    }
}

std::string fixed5(const Ratio& r) { return format_ratio(r); }

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Ontology audit, metrics, evaluation-sheet and concordance toolkit", "ontoeval"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Common common;
    int exit_code = kOk;

    // parse
    std::string parse_path;
    auto* parse_cmd = app.add_subcommand("parse", "Load an RDF/XML ontology and summarize it");
    parse_cmd->add_option("ontology", parse_path, "RDF/XML file")->required();
    add_common(parse_cmd, common);

    // audit
    std::string audit_path;
    auto* audit_cmd = app.add_subcommand("audit", "Structural taxonomy audit; exit 1 when it fails");
    audit_cmd->add_option("ontology", audit_path, "RDF/XML file")->required();
    add_common(audit_cmd, common);

    // metrics
    std::string metrics_path;
    std::string reference_path;
    auto* metrics_cmd = app.add_subcommand("metrics", "Schema metrics with optional reference deltas");
    metrics_cmd->add_option("ontology", metrics_path, "RDF/XML file")->required();
    metrics_cmd->add_option("--reference", reference_path, "JSON object of reference metric values");
    add_common(metrics_cmd, common);

    // merge
    std::vector<std::string> merge_paths;
    std::string policy_path;
    std::string curie_default;
    auto* merge_cmd = app.add_subcommand("merge", "Merge ontologies under a policy and write merged.owl");
    merge_cmd->add_option("ontologies", merge_paths, "RDF/XML files in merge order")->required()->expected(2, -1);
    merge_cmd->add_option("--policy", policy_path, "Merge policy JSON")->required();
    merge_cmd->add_option("--curie-default", curie_default, "Prefix stem for namespaces without a CURIE prefix");
    add_common(merge_cmd, common);

    // pairs
    std::string pairs_path;
    std::string quota_text;
    std::uint64_t seed = 0;
    std::string training_text;
    std::size_t max_distance = 4;
    auto* pairs_cmd = app.add_subcommand("pairs", "Sample a stratified concept-pair sheet");
    pairs_cmd->add_option("ontology", pairs_path, "RDF/XML file")->required();
    pairs_cmd->add_option("--quota", quota_text, "child,grandparent,unrelated counts")->required();
    pairs_cmd->add_option("--seed", seed, "Sampling seed")->required();
    pairs_cmd->add_option("--training", training_text, "Training rows: a total (split proportionally) or c,g,u");
    pairs_cmd->add_option("--max-distance", max_distance, "Largest ancestor distance in the grandparent stratum");
    add_common(pairs_cmd, common);

    // stats
    std::string stats_sheet;
    std::vector<std::string> judgment_files;
    bool include_training = false;
    bool table = false;
    std::string kappa_basis = "child";
    auto* stats_cmd = app.add_subcommand("stats", "Agreement and Fisher statistics for two judgment files");
    stats_cmd->add_option("--sheet", stats_sheet, "Sheet sidecar JSON written by `pairs`")->required();
    stats_cmd->add_option("judgments", judgment_files, "Two completed sheets (CSV)")->required()->expected(2);
    stats_cmd->add_flag("--include-training", include_training, "Count the pre-filled training rows too");
    stats_cmd->add_flag("--table", table, "Print a plain-text summary instead of JSON");
    stats_cmd->add_option("--kappa-basis", kappa_basis, "Answers counted as include for kappa: child or pooled");
    add_common(stats_cmd, common, false);

    // validate
    std::string validate_sheet;
    std::string adapter_path;
    std::string script_path;
    std::string protocol_path;
    bool affirm = false;
    std::size_t parallel = 4;
    auto* validate_cmd = app.add_subcommand("validate", "Run the IS-A concordance dialogue for a sheet");
    validate_cmd->add_option("--sheet", validate_sheet, "Sheet sidecar JSON")->required();
    auto* adapter_opt = validate_cmd->add_option("--adapter", adapter_path, "HTTP adapter manifest");
    auto* script_opt = validate_cmd->add_option("--script", script_path, "Scripted responses JSON");
    auto* affirm_opt = validate_cmd->add_flag("--affirm", affirm, "Stub backend that always agrees");
    adapter_opt->excludes(script_opt)->excludes(affirm_opt);
    script_opt->excludes(affirm_opt);
    validate_cmd->add_option("--protocol", protocol_path, "Protocol configuration JSON");
    validate_cmd->add_option("--parallel", parallel, "Concurrent sessions")->check(CLI::PositiveNumber);
    add_common(validate_cmd, common, false);

    // replay
    std::string corpus_dir;
    std::string replay_sheet;
    std::string replay_protocol;
    bool verify = false;
    auto* replay_cmd = app.add_subcommand("replay", "Classify a directory of stored transcripts");
    replay_cmd->add_option("corpus", corpus_dir, "Directory of session-*.jsonl files")->required();
    replay_cmd->add_option("--sheet", replay_sheet, "Sheet sidecar JSON to check strata against");
    replay_cmd->add_option("--protocol", replay_protocol, "Protocol configuration JSON");
    replay_cmd->add_flag("--verify", verify, "Re-run the dialogue against the recording and compare");
    add_common(replay_cmd, common, false);

    // serve
    std::string serve_sheet;
    std::string judgments_path;
    ServerOptions server_options;
    auto* serve_cmd = app.add_subcommand("serve", "Local JSON API for collecting judgments");
    serve_cmd->add_option("--sheet", serve_sheet, "Sheet sidecar JSON")->required();
    serve_cmd->add_option("--judgments", judgments_path, "Judgment store (JSON); resumed when present");
    serve_cmd->add_option("--port", server_options.port, "TCP port (0 picks one)");
    serve_cmd->add_option("--host", server_options.host, "Bind address");
    serve_cmd->add_option("--token", server_options.token, "Session token (generated when omitted)");
    serve_cmd->add_option("--static", server_options.static_dir, "Directory with a built review UI");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (*parse_cmd) {
            Session s("parse", args, common, out);
            BuildDiagnostics diag;
            const auto model = s.load(parse_path, &diag);
            auto report = model_summary(model);
            report["diagnostics"] = {{"ignored_triples", diag.ignored_triples}, {"notes", diag.notes}};
            if (s.has_out()) s.write_artifact("summary.json", report.dump(2) + "\n");
            s.emit(std::move(report));
        } else if (*audit_cmd) {
            Session s("audit", args, common, out);
            const auto audit = structural_audit(s.load(audit_path));
            auto report = to_json(audit);
            if (s.has_out()) s.write_artifact("audit.json", report.dump(2) + "\n");
            s.emit(std::move(report));
            if (!audit.passed) exit_code = kAuditFailed;
        } else if (*metrics_cmd) {
            Session s("metrics", args, common, out);
            const auto metrics = schema_metrics(s.load(metrics_path));
            auto report = to_json(metrics);
            if (!reference_path.empty()) {
                s.manifest().add_input(reference_path);
                report["reference_deltas"] = to_json(compare_metrics(metrics, load_metric_reference(reference_path)));
            }
            if (s.has_out()) s.write_artifact("metrics.json", report.dump(2) + "\n");
            s.emit(std::move(report));
        } else if (*merge_cmd) {
            if (common.out_dir.empty()) throw ConfigError("merge needs --out for merged.owl");
            Session s("merge", args, common, out);
            const auto prefixes = s.prefixes();
            std::vector<OntologyModel> models;
            for (const auto& p : merge_paths) {
                s.manifest().add_input(p);
                models.push_back(load_ontology(p, prefixes));
            }
            s.manifest().add_input(policy_path);
            const auto policy = load_merge_policy(policy_path);
            s.manifest().config = {{"collision_rule", to_string(policy.collision_rule)}};
            MergeSummary summary;
            auto merged = merge(models, policy, &summary);
            if (!curie_default.empty()) merged = annotate_curies(merged, merged.prefixes, curie_default);
            std::size_t skipped = 0;
            const auto xml = write_rdfxml(merged, &skipped);
            s.write_artifact("merged.owl", xml);
            const auto reparsed = build_model(parse_rdfxml_file(s.artifact("merged.owl")), prefixes);
            auto report = to_json(summary);
            report["model"] = model_summary(merged);
            report["audit_passed"] = structural_audit(merged).passed;
            report["roundtrip_identical"] = reparsed == merged;
            report["opaque_axioms_skipped"] = skipped;
            report["output"] = s.artifact("merged.owl");
            s.emit(std::move(report));
        } else if (*pairs_cmd) {
            if (common.out_dir.empty()) throw ConfigError("pairs needs --out for sheet.csv and sheet.json");
            Session s("pairs", args, common, out);
            const auto model = s.load(pairs_path);
            const auto quota = parse_quota(quota_text);
            SamplingOptions options;
            options.grandparent_max_distance = max_distance;
            if (!training_text.empty()) {
                options.training = training_text.find(',') == std::string::npos
                                       ? proportional_split(quota, std::stoul(training_text))
                                       : parse_quota(training_text);
            }
            auto sheet = sample_pairs(TaxonomyGraph(model), quota, seed, options);
            sheet.source_ontology = fs::path(pairs_path).filename().string();
            sheet.source_sha256 = s.manifest().inputs.at(pairs_path);
            s.manifest().seed = seed;
            s.manifest().config = {{"quota", quota_text},
                                   {"grandparent_max_distance", max_distance},
                                   {"training_prefix", sheet.training_prefix}};
            s.write_artifact("sheet.csv", export_sheet(sheet));
            s.write_artifact("sheet.json", sheet_to_json(sheet).dump(2) + "\n");
            s.emit({{"report_version", kReportVersion},
                    {"rows", sheet.pairs.size()},
                    {"training_prefix", sheet.training_prefix},
                    {"quota", {{"child", quota.child}, {"grandparent", quota.grandparent}, {"unrelated", quota.unrelated}}},
                    {"sheet", s.artifact("sheet.csv")},
                    {"sidecar", s.artifact("sheet.json")}});
        } else if (*stats_cmd) {
            Session s("stats", args, common, out);
            s.manifest().add_input(stats_sheet);
            const auto sheet = load_sheet_sidecar(stats_sheet);
            const std::size_t skip = include_training ? 0 : sheet.training_prefix;
            const std::vector<ConceptPair> evaluated(sheet.pairs.begin() + static_cast<std::ptrdiff_t>(skip),
                                                     sheet.pairs.end());
            const auto truth = pooled_truth(evaluated);
            const auto basis = parse_rating_basis(kappa_basis);
            s.manifest().config = {{"kappa_basis", to_string(basis)}, {"include_training", include_training}};
            std::vector<RatingVector> ratings;
            nlohmann::json evaluators = nlohmann::json::array();
            std::vector<std::pair<Matrix2x2, FisherResult>> tables;
            for (const auto& file : judgment_files) {
                s.manifest().add_input(file);
                const auto imported = import_judgments(read_file(file), sheet);
                for (const auto& w : imported.warnings) err << file << ": warning: " << w << '\n';
                const std::vector<Judgment> rows(imported.judgments.begin() + static_cast<std::ptrdiff_t>(skip),
                                                 imported.judgments.end());
                ratings.push_back(ratings_from_judgments(rows, basis));
                const auto m = confusion_matrix(ratings_from_judgments(rows, RatingBasis::Pooled), truth);
                const auto f = fisher_exact(m);
                tables.emplace_back(m, f);
                evaluators.push_back({{"file", file},
                                      {"confusion_matrix", to_json(m)},
                                      {"fisher", to_json(f)},
                                      {"warnings", imported.warnings}});
            }
            const auto kappa = cohens_kappa(ratings[0], ratings[1]);
            if (table) {
                out << "evaluated pairs  " << evaluated.size() << '\n';
                out << "kappa basis      " << to_string(basis) << '\n';
                out << "kappa            " << (kappa.kappa ? fixed5(*kappa.kappa) : std::string("undefined")) << '\n';
                out << "p_o              " << fixed5(kappa.observed) << '\n';
                out << "p_e              " << fixed5(kappa.expected) << '\n';
                out << "evaluator  inc/rel  inc/unrel  exc/rel  exc/unrel  fisher_p\n";
                for (std::size_t i = 0; i < tables.size(); ++i) {
                    const auto& [m, f] = tables[i];
                    out << std::left << std::setw(11) << (i + 1) << std::setw(9) << m.a << std::setw(11) << m.b
                        << std::setw(9) << m.c << std::setw(11) << m.d << to_json(f)["p"].get<std::string>() << '\n';
                }
                s.save_manifest();
                return kOk;
            }
            s.emit({{"report_version", kReportVersion},
                    {"evaluated_pairs", evaluated.size()},
                    {"percent_agreement", {{"value", fixed5(kappa.observed)}, {"exact", rational_string(kappa.observed)}}},
                    {"kappa_basis", to_string(basis)},
                    {"kappa", to_json(kappa)},
                    {"evaluators", evaluators}});
        } else if (*validate_cmd) {
            Session s("validate", args, common, out);
            s.manifest().add_input(validate_sheet);
            const auto sheet = load_sheet_sidecar(validate_sheet);
            const auto config = load_protocol(protocol_path, s.manifest());
            std::unique_ptr<Backend> backend;
            if (!adapter_path.empty()) {
                s.manifest().add_input(adapter_path);
                backend = std::make_unique<HttpBackend>(load_adapter(adapter_path));
            } else if (!script_path.empty()) {
                s.manifest().add_input(script_path);
                backend = std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(script_path));
            } else if (affirm) {
                backend = make_affirming_backend();
            } else {
                throw ConfigError("validate needs one of --adapter, --script or --affirm");
            }
            s.manifest().config = to_json(config);
            s.manifest().config["backend"] = backend->id();
            const auto transcripts_dir = s.has_out() ? s.artifact("transcripts") : std::string();
            const auto clock = adapter_path.empty() ? logical_clock() : system_clock();
            const auto transcripts = run_sessions(sheet.pairs, config, *backend, clock, transcripts_dir, parallel);
            std::vector<Outcome> outcomes;
            for (const auto& t : transcripts) outcomes.push_back(classify_outcome(t, config));
            auto report = to_json(aggregate(transcripts, outcomes, sheet));
            const auto failed = std::count_if(transcripts.begin(), transcripts.end(), [](const Transcript& t) {
                return t.status == SessionStatus::BackendError;
            });
            report["backend_failures"] = failed;
            report["report_version"] = kReportVersion;
            if (s.has_out()) {
                for (const auto& t : transcripts) s.manifest().add_output((fs::path(transcripts_dir) / transcript_file_name(t.session)).string());
                s.write_artifact("report.json", report.dump(2) + "\n");
            }
            s.emit(std::move(report));
            if (failed > 0) exit_code = kBackendError;
        } else if (*replay_cmd) {
            Session s("replay", args, common, out);
            const auto config = load_protocol(replay_protocol, s.manifest());
            const auto corpus = read_corpus(corpus_dir);
            for (const auto& entry : fs::directory_iterator(corpus_dir)) {
                if (entry.path().extension() == ".jsonl") s.manifest().add_input(entry.path().string());
            }
            std::vector<Outcome> outcomes;
            for (const auto& t : corpus) outcomes.push_back(classify_outcome(t, config));
            ConcordanceReport agg;
            if (!replay_sheet.empty()) {
                s.manifest().add_input(replay_sheet);
                agg = aggregate(corpus, outcomes, load_sheet_sidecar(replay_sheet));
            } else {
                agg = aggregate(corpus, outcomes);
            }
            auto report = to_json(agg);
            report["report_version"] = kReportVersion;
            if (verify) {
                auto recorded = ScriptedBackend::from_corpus(corpus);
                std::size_t mismatches = 0;
                for (const auto& t : corpus) {
                    const auto clock = [&t](std::size_t, std::size_t turn) {
                        return turn < t.turns.size() ? t.turns[turn].timestamp : std::string();
                    };
                    auto again = run_session(t.pair, t.session, config, recorded, clock);
                    again.backend_id = t.backend_id;
                    if (!(again == t)) ++mismatches;
                }
                report["verify"] = {{"sessions", corpus.size()}, {"mismatches", mismatches}};
                if (mismatches > 0) exit_code = kAuditFailed;
            }
            if (s.has_out()) s.write_artifact("report.json", report.dump(2) + "\n");
            s.emit(std::move(report));
        } else if (*serve_cmd) {
            auto store = std::make_shared<JudgmentStore>(load_sheet_sidecar(serve_sheet), judgments_path);
            ReviewServer server(store, server_options);
            const int port = server.bind();
            out << nlohmann::json{{"url", "http://" + server_options.host + ":" + std::to_string(port) + "/"},
                                  {"token", server.token()}}
                       .dump()
                << std::endl;
            err << "serving " << serve_sheet << " on http://" << server_options.host << ':' << port
                << "/?token=" << server.token() << std::endl;
            server.listen();
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return exit_code;
}

} // namespace ontoeval::cli
