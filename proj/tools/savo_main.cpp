// savo: command line front end for the caption OCR library.

#include <fnmatch.h>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "savo/error.hpp"
#include "savo/eval.hpp"
#include "savo/pipeline.hpp"
#include "savo/png_io.hpp"
#include "savo/stories.hpp"
#include "savo/synth.hpp"
#include "savo/training.hpp"
#include "savo/utf8.hpp"

namespace fs = std::filesystem;
using namespace savo;

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitMissingModel = 3;

std::vector<fs::path> expand_glob(const std::string& pattern) {
    const fs::path p(pattern);
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    const std::string leaf = p.filename().string();
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "no such directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && fnmatch(leaf.c_str(), e.path().filename().c_str(), 0) == 0) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw Error(ErrorCode::EmptyInput, "no frames match " + pattern);
    return out;
}

std::pair<pipeline::Stage, fs::path> stage_dir(const std::string& arg) {
    const auto colon = arg.find(':');
    const auto stage = pipeline::stage_from_string(arg.substr(0, colon));
    if (colon == std::string::npos || !stage || colon + 1 == arg.size()) {
        throw Error(ErrorCode::BadArgument, "expected <stage>:<dir> with stage localize|binarize|segment|features|classify, got '" + arg + "'");
    }
    return {*stage, fs::path(arg.substr(colon + 1))};
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        pipeline::write_text_file(out, text);
    }
}

synth::Truth load_truth(const fs::path& path) { return synth::truth_from_json(pipeline::read_text_file(path)); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Arabic caption OCR for news video frames"};
    app.require_subcommand(1);

    // pipeline
    auto* run = app.add_subcommand("pipeline", "Localize and recognize caption text in frames");
    std::string frames_glob, config_path, models_dir, lexicon_path, out_path = "-", overlay_dir, resume_arg;
    std::vector<std::string> dump_specs;
    run->add_option("--frames", frames_glob, "Frame PNG glob, e.g. 'clip/frame_*.png'")->required();
    run->add_option("--config", config_path, "key=value configuration file")->required();
    run->add_option("--models", models_dir, "Directory holding mlp.json and knn.json");
    run->add_option("--lexicon", lexicon_path, "UTF-8 word list");
    run->add_option("--out", out_path, "Result JSON path ('-' for stdout)");
    run->add_option("--overlay", overlay_dir, "Write detection overlays here");
    run->add_option("--dump-stage", dump_specs, "Dump a stage as <stage>:<dir> (repeatable)");
    run->add_option("--resume", resume_arg, "Continue from a stage dump <stage>:<dir>");

    // train
    auto* train = app.add_subcommand("train", "Train models");
    train->require_subcommand(1);
    auto* train_mlp = train->add_subcommand("mlp", "Band classifier from a labelled synthetic set");
    std::string data_dir, train_out, train_config;
    localization::MlpTrainConfig mlp_cfg;
    train_mlp->add_option("--data", data_dir, "Directory with frames and truth.json")->required();
    train_mlp->add_option("--config", train_config, "Pipeline configuration (band height)");
    train_mlp->add_option("--epochs", mlp_cfg.epochs)->capture_default_str();
    train_mlp->add_option("--lr", mlp_cfg.lr)->capture_default_str();
    train_mlp->add_option("--seed", mlp_cfg.seed)->capture_default_str();
    train_mlp->add_option("--out", train_out)->required();

    auto* train_knn = train->add_subcommand("knn", "Prototype store rendered from a glyph atlas");
    std::string atlas_dir;
    training::GlyphTraining glyph_cfg;
    train_knn->add_option("--atlas", atlas_dir, "Atlas directory")->required();
    train_knn->add_option("--config", train_config, "Pipeline configuration (line handling)");
    train_knn->add_option("--per-class", glyph_cfg.per_class)->capture_default_str();
    train_knn->add_option("--seed", glyph_cfg.seed)->capture_default_str();
    train_knn->add_option("--out", train_out)->required();
    std::string features_csv;
    train_knn->add_option("--features-csv", features_csv, "Also write one row per glyph: 323 features then the label");

    auto* train_som = train->add_subcommand("som", "Self-organizing map over shot vectors");
    std::string vectors_path;
    stories::SomConfig som_cfg;
    train_som->add_option("--vectors", vectors_path, "CSV shot_id,f1,...,fn")->required();
    train_som->add_option("--rows", som_cfg.rows)->capture_default_str();
    train_som->add_option("--cols", som_cfg.cols)->capture_default_str();
    train_som->add_option("--epochs", som_cfg.epochs)->capture_default_str();
    train_som->add_option("--seed", som_cfg.seed)->capture_default_str();
    train_som->add_option("--out", train_out)->required();

    // stories
    auto* st = app.add_subcommand("stories", "Split a news program into stories at anchor shots");
    stories::StoryConfig story_cfg;
    std::string som_path, stories_out = "-";
    st->add_option("--vectors", vectors_path, "CSV shot_id,f1,...,fn in broadcast order")->required();
    st->add_option("--kmax", story_cfg.k_max)->required();
    st->add_option("--som", som_path, "Use a trained map instead of training one");
    st->add_option("--seed", story_cfg.som.seed)->capture_default_str();
    st->add_option("--out", stories_out);

    // synth
    auto* syn = app.add_subcommand("synth", "Synthetic material");
    syn->require_subcommand(1);
    auto* syn_atlas = syn->add_subcommand("atlas", "Write the built-in glyph atlas");
    std::string synth_out;
    syn_atlas->add_option("--out", synth_out)->required();
    auto* syn_bg = syn->add_subcommand("backgrounds", "Write procedural backgrounds");
    int bg_count = 12, bg_w = 320, bg_h = 240;
    std::uint64_t synth_seed = 1;
    syn_bg->add_option("--count", bg_count)->capture_default_str();
    syn_bg->add_option("--width", bg_w)->capture_default_str();
    syn_bg->add_option("--height", bg_h)->capture_default_str();
    syn_bg->add_option("--seed", synth_seed)->capture_default_str();
    syn_bg->add_option("--out", synth_out)->required();
    auto* syn_frames = syn->add_subcommand("frames", "Composite words onto backgrounds with ground truth");
    std::string words_path, bg_dir;
    int n_frames = 50;
    syn_frames->add_option("--atlas", atlas_dir)->required();
    syn_frames->add_option("--words", words_path)->required();
    syn_frames->add_option("--backgrounds", bg_dir)->required();
    syn_frames->add_option("--n", n_frames)->capture_default_str();
    syn_frames->add_option("--seed", synth_seed)->capture_default_str();
    syn_frames->add_option("--out", synth_out)->required();

    // eval
    auto* ev = app.add_subcommand("eval", "Score results against ground truth");
    ev->require_subcommand(1);
    std::string result_path, truth_path, eval_out = "-";
    double iou_threshold = 0.5;
    auto* ev_detect = ev->add_subcommand("detect", "Localization precision and recall");
    auto* ev_recognize = ev->add_subcommand("recognize", "Character and word recognition rates");
    for (auto* c : {ev_detect, ev_recognize}) {
        c->add_option("--result", result_path)->required();
        c->add_option("--truth", truth_path)->required();
        c->add_option("--iou", iou_threshold)->capture_default_str();
        c->add_option("--out", eval_out);
    }

    // config
    auto* cfg = app.add_subcommand("config", "Print the default configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitBadInput;
    }

    try {
        if (*run) {
            const auto config = pipeline::load_config(config_path);
            const fs::path models = !models_dir.empty() ? fs::path(models_dir) : fs::path(config.models);
            const fs::path lexicon_file = !lexicon_path.empty() ? fs::path(lexicon_path) : fs::path(config.lexicon);
            if (models.empty()) throw Error(ErrorCode::MissingModel, "no model directory given (--models or models=)");
            const auto loaded = pipeline::load_models(models);
            if (lexicon_file.empty()) throw Error(ErrorCode::BadArgument, "no lexicon given (--lexicon or lexicon=)");
            const auto lexicon = post::Lexicon::load(lexicon_file);

            pipeline::RunOptions options;
            if (!overlay_dir.empty()) options.overlay_dir = overlay_dir;
            for (const auto& d : dump_specs) options.dumps.push_back(stage_dir(d));
            if (!resume_arg.empty()) options.resume = stage_dir(resume_arg);

            const auto files = expand_glob(frames_glob);
            const pipeline::FrameLoader load = [&](std::size_t i) { return io::read_color_png(files[i]); };
            const auto result = pipeline::run_pipeline(files.size(), load, config, loaded, lexicon, options);
            emit(pipeline::result_to_json(result), out_path);
        } else if (*train_mlp) {
            localization::LocalizeConfig localize;
            if (!train_config.empty()) localize = pipeline::load_config(train_config).localize;
            const auto truth = load_truth(fs::path(data_dir) / "truth.json");
            std::vector<localization::TrainingSample> samples;
            for (const auto& f : truth.frames) {
                const auto frame = io::read_color_png(fs::path(data_dir) / f.file);
                auto s = training::band_samples(frame, f.boxes, localize);
                samples.insert(samples.end(), s.begin(), s.end());
            }
            const auto trained = localization::mlp_train(training::balance(std::move(samples)), mlp_cfg);
            pipeline::write_text_file(train_out, localization::mlp_to_json(trained.model) + "\n");
            std::cerr << "final loss " << trained.loss_history.back() << "\n";
        } else if (*train_knn) {
            auto config = train_config.empty() ? pipeline::parse_config("seed = 1") : pipeline::load_config(train_config);
            const auto atlas = synth::GlyphAtlas::load(atlas_dir);
            const auto samples = training::glyph_samples(atlas, config, glyph_cfg);
            pipeline::write_text_file(train_out, recognition::store_to_json(recognition::build_store(samples)) + "\n");
            if (!features_csv.empty()) {
                std::ostringstream csv;
                for (const auto& s : samples) {
                    for (const double v : s.features) csv << v << ',';
                    csv << utf8::encode(s.label.letter) << ':' << shaping::to_string(s.label.form) << '\n';
                }
                pipeline::write_text_file(features_csv, csv.str());
            }
            std::cerr << samples.size() << " prototypes\n";
        } else if (*train_som) {
            const auto shots = stories::read_shot_csv(pipeline::read_text_file(vectors_path));
            pipeline::write_text_file(train_out, stories::som_to_json(stories::train_som(shots, som_cfg)) + "\n");
        } else if (*st) {
            const auto shots = stories::read_shot_csv(pipeline::read_text_file(vectors_path));
            std::optional<stories::SomGrid> grid;
            if (!som_path.empty()) {
                if (!fs::is_regular_file(som_path)) throw Error(ErrorCode::MissingModel, "missing model " + som_path);
                grid = stories::som_from_json(pipeline::read_text_file(som_path));
            }
            const auto result = stories::segment_program(shots, story_cfg, grid ? &*grid : nullptr);
            emit(stories::story_result_to_json(result) + "\n", stories_out);
        } else if (*syn_atlas) {
            synth::build_default_atlas().save(synth_out);
        } else if (*syn_bg) {
            synth::write_backgrounds(synth_out, bg_count, bg_w, bg_h, synth_seed);
        } else if (*syn_frames) {
            const auto atlas = synth::GlyphAtlas::load(atlas_dir);
            synth::synth_generate(atlas, synth::read_word_list(words_path), synth::read_backgrounds(bg_dir), n_frames,
                                  synth_seed, synth_out);
        } else if (*ev_detect || *ev_recognize) {
            const auto result = pipeline::result_from_json(pipeline::read_text_file(result_path));
            const auto report = eval::evaluate(result, load_truth(truth_path), iou_threshold);
            emit(eval::report_to_json(report), eval_out);
        } else if (*cfg) {
            auto defaults = pipeline::PipelineConfig{};
            defaults.seed = 1;
            std::cout << pipeline::config_to_text(defaults);
        }
    } catch (const Error& e) {
        std::cerr << "savo: " << e.what() << "\n";
        return e.code() == ErrorCode::MissingModel ? kExitMissingModel : kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "savo: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
