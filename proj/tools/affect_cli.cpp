#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "affect/app/commands.hpp"
#include "affect/app/config.hpp"
#include "affect/app/synth.hpp"
#include "affect/common/csv.hpp"
#include "affect/common/diagnostics.hpp"
#include "affect/common/errors.hpp"
#include "affect/fuse/fusion.hpp"
#include "affect/learn/prediction.hpp"

namespace fs = std::filesystem;
using namespace affect;

namespace {

struct RunOverrides {
    fs::path config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> folds;
    std::optional<std::size_t> inner_folds;
    std::optional<std::string> task;
    std::optional<std::string> modality;
};

void add_run_options(CLI::App* cmd, RunOverrides& o, bool with_modality = true) {
    cmd->add_option("-c,--config", o.config, "Pipeline config file")->required();
    cmd->add_option("--seed", o.seed, "Override [run] seed");
    cmd->add_option("--folds", o.folds, "Override [cv] folds");
    cmd->add_option("--inner-folds", o.inner_folds, "Override [cv] inner_folds");
    cmd->add_option("--task", o.task, "Override [run] task (valence|arousal)");
    if (with_modality) cmd->add_option("--modality", o.modality, "acoustic|linguistic|bimodal");
}

app::PipelineConfig resolve(const RunOverrides& o) {
    app::PipelineConfig config = app::load_config(o.config);
    if (o.seed) config.seed = *o.seed;
    if (o.folds) config.folds = *o.folds;
    if (o.inner_folds) config.inner_folds = *o.inner_folds;
    if (o.task) config.task = parse_task(*o.task);
    if (config.folds < 2) throw ConfigError("folds: need at least 2 folds");
    if (config.inner_folds < 2) throw ConfigError("inner_folds: need at least 2 folds");
    return config;
}

app::Modality modality_of(const RunOverrides& o, const app::PipelineConfig& config) {
    return o.modality ? app::parse_modality(*o.modality) : app::default_modality(config);
}

std::vector<learn::PredictionSet> read_aligned(const std::vector<fs::path>& paths) {
    std::vector<learn::PredictionSet> sets;
    for (const auto& p : paths) {
        auto set = learn::read_predictions_csv(p);
        if (!sets.empty()) set = learn::align_to(set, sets.front().story_ids);
        sets.push_back(std::move(set));
    }
    return sets;
}

void emit(const learn::PredictionSet& set, const std::optional<fs::path>& out) {
    learn::write_predictions_csv(out ? *out : fs::path("/dev/stdout"), set);
}

std::vector<Label> truth_for(const fs::path& truth_csv, const learn::PredictionSet& set) {
    std::map<std::string, Label> truth;
    for (const auto& [id, l] : app::read_truth_csv(truth_csv)) truth[id] = l;
    std::vector<Label> out;
    for (const auto& id : set.story_ids) {
        auto it = truth.find(id);
        if (it == truth.end()) throw DataError(truth_csv.string() + ": no label for story '" + id + "'");
        out.push_back(it->second);
    }
    return out;
}

std::vector<double> parse_weights(const std::string& text) {
    std::vector<double> w;
    for (const auto& part : split_csv_line(text)) w.push_back(parse_real(part, "--weights"));
    return w;
}

int run(int argc, char** argv) {
    CLI::App cli{"Bi-modal ternary emotion classification pipeline"};
    cli.require_subcommand(1);
    cli.fallthrough();
    bool quiet = false;
    cli.add_flag("-q,--quiet", quiet, "Suppress progress output");

    // synth
    auto* synth = cli.add_subcommand("synth", "Write a deterministic synthetic corpus");
    fs::path synth_out;
    app::SynthOptions synth_opts;
    synth->add_option("-o,--out", synth_out, "Output directory")->required();
    synth->add_option("--seed", synth_opts.seed, "Generator seed");
    synth->add_option("--speakers", synth_opts.speakers, "Labeled speakers");
    synth->add_option("--stories", synth_opts.stories_per_speaker, "Stories per speaker");
    synth->add_option("--test-speakers", synth_opts.test_speakers, "Additional unlabeled speakers");

    // extract
    RunOverrides extract_o;
    auto* extract = cli.add_subcommand("extract", "Write per-story feature CSVs");
    add_run_options(extract, extract_o);

    // fv fit | encode
    auto* fv = cli.add_subcommand("fv", "Fisher vector background models");
    fv->require_subcommand(1);
    RunOverrides fv_fit_o, fv_enc_o;
    fs::path fv_fit_dir, fv_enc_dir, fv_enc_out;
    auto* fv_fit = fv->add_subcommand("fit", "Fit LLD PCA, GMM and optional FV PCA on the labeled stories");
    add_run_options(fv_fit, fv_fit_o, false);
    fv_fit->add_option("-m,--model-dir", fv_fit_dir, "Model output directory")->required();
    auto* fv_enc = fv->add_subcommand("encode", "Encode every story with saved models");
    add_run_options(fv_enc, fv_enc_o, false);
    fv_enc->add_option("-m,--model-dir", fv_enc_dir, "Model directory")->required();
    fv_enc->add_option("-o,--out", fv_enc_out, "Output CSV")->required();

    // cv
    RunOverrides cv_o;
    auto* cv = cli.add_subcommand("cv", "N-fold cross-validation");
    add_run_options(cv, cv_o);

    // nested
    RunOverrides nested_o;
    auto* nested = cli.add_subcommand("nested", "Nested N-fold cross-validation over the classifier grid");
    add_run_options(nested, nested_o);

    // fuse two | vote | weighted
    auto* fuse = cli.add_subcommand("fuse", "Decision fusion of prediction CSVs");
    fuse->require_subcommand(1);
    fs::path two_major, two_minor, two_counts;
    std::optional<std::string> two_minority_set;
    std::optional<fs::path> fuse_out;
    auto* two = fuse->add_subcommand("two", "Ordinal two-set rule fusion");
    two->add_option("--majority", two_major, "Majority-favouring prediction CSV (P)")->required();
    two->add_option("--minority", two_minor, "Minority-favouring prediction CSV (S)")->required();
    two->add_option("--counts", two_counts, "Training class counts JSON")->required();
    two->add_option("--minority-set", two_minority_set, "Explicit minority set, e.g. LH");
    two->add_option("-o,--out", fuse_out, "Output CSV (default stdout)");

    std::vector<fs::path> vote_inputs;
    fs::path vote_counts;
    auto* vote = fuse->add_subcommand("vote", "Plurality vote over three or more sets");
    vote->add_option("inputs", vote_inputs, "Prediction CSVs")->required()->expected(2, -1);
    vote->add_option("--counts", vote_counts, "Training class counts JSON")->required();
    vote->add_option("-o,--out", fuse_out, "Output CSV (default stdout)");

    std::vector<fs::path> weighted_inputs;
    fs::path weighted_counts;
    std::optional<std::string> weights_text;
    std::optional<fs::path> weights_truth;
    std::optional<std::vector<fs::path>> dev_inputs;
    double step = 0.1;
    auto* weighted = fuse->add_subcommand("weighted", "Weighted z-normalized score fusion");
    weighted->add_option("inputs", weighted_inputs, "Prediction CSVs")->required()->expected(1, -1);
    weighted->add_option("--counts", weighted_counts, "Training class counts JSON")->required();
    auto* w_opt = weighted->add_option("--weights", weights_text, "Comma-separated weights");
    auto* t_opt = weighted->add_option("--truth", weights_truth, "Truth CSV for the weight search");
    weighted->add_option("--dev", dev_inputs, "Development prediction CSVs for the search (default: the inputs)");
    weighted->add_option("--step", step, "Search grid step");
    weighted->add_option("-o,--out", fuse_out, "Output CSV (default stdout)");
    w_opt->excludes(t_opt);

    // report
    fs::path report_dir;
    auto* report = cli.add_subcommand("report", "Summarize the prediction CSVs in a directory");
    report->add_option("dir", report_dir, "Directory with *_predictions.csv")->required();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : 2;
    }

    Diagnostics* diag = nullptr;
    auto say = [&](const std::string& s) {
        if (!quiet) std::cerr << s << '\n';
    };

    if (*synth) {
        const auto summary = app::synthesize_corpus(synth_out, synth_opts);
        say("wrote " + std::to_string(summary.stories) + " stories (" + std::to_string(summary.labeled) +
            " labeled) to " + synth_out.string());
        std::cout << summary.config.string() << '\n';
    } else if (*extract) {
        const auto config = resolve(extract_o);
        std::cout << app::extract_features(config, modality_of(extract_o, config), diag).string() << '\n';
    } else if (*fv_fit) {
        app::fit_fv_models(resolve(fv_fit_o), fv_fit_dir, diag);
        say("models written to " + fv_fit_dir.string());
    } else if (*fv_enc) {
        app::encode_fv_file(resolve(fv_enc_o), fv_enc_dir, fv_enc_out, diag);
        std::cout << fv_enc_out.string() << '\n';
    } else if (*cv) {
        const auto config = resolve(cv_o);
        const auto result = app::run_cv_pipeline(config, modality_of(cv_o, config), diag);
        const auto prefix = app::write_cv_outputs(config, result);
        std::printf("%s %s UAR %.4f\n", std::string(to_string(result.task)).c_str(),
                    app::to_string(result.modality).c_str(), result.uar);
        say("report: " + prefix.string() + "_report.txt");
    } else if (*nested) {
        const auto config = resolve(nested_o);
        const auto result = app::run_nested_pipeline(config, modality_of(nested_o, config), diag);
        const auto prefix = app::write_nested_outputs(config, result);
        std::printf("%s %s nested UAR %.4f (pre-scoring label reads %zu)\n",
                    std::string(to_string(result.task)).c_str(), app::to_string(result.modality).c_str(),
                    result.result.mean_uar, result.result.pre_scoring_reads);
        say("report: " + prefix.string() + "_report.txt");
    } else if (*two) {
        const auto sets = read_aligned({two_major, two_minor});
        auto ctx = fuse::FusionContext::from_counts(app::read_counts_json(two_counts));
        if (two_minority_set) ctx.minority_set = LabelSet::parse(*two_minority_set);
        emit(fuse::fuse_two(sets[0], sets[1], ctx), fuse_out);
    } else if (*vote) {
        const auto sets = read_aligned(vote_inputs);
        emit(fuse::majority_vote(sets, fuse::FusionContext::from_counts(app::read_counts_json(vote_counts))), fuse_out);
    } else if (*weighted) {
        const auto sets = read_aligned(weighted_inputs);
        const ClassCounts counts = app::read_counts_json(weighted_counts);
        std::vector<double> weights;
        if (weights_text) {
            weights = parse_weights(*weights_text);
        } else {
            if (!weights_truth) throw ConfigError("fuse weighted: give --weights or --truth for the search");
            const auto dev = dev_inputs ? read_aligned(*dev_inputs) : sets;
            weights = fuse::search_fusion_weights(dev, truth_for(*weights_truth, dev.front()), step, counts);
            std::string w;
            for (double x : weights) w += (w.empty() ? "" : ",") + format_real(x);
            say("weights: " + w);
        }
        emit(fuse::weighted_score_fusion(sets, weights, counts), fuse_out);
    } else if (*report) {
        std::cout << app::build_report(report_dir);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
