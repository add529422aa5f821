// medrec command line: run a setup, generate a synthetic corpus, or check the
// published tables for internal consistency.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "medrec/harness.hpp"
#include "medrec/synthetic.hpp"

namespace {

using namespace medrec;

int run_command(const RunConfig& cfg) {
  auto out = run_from_config(cfg);
  for (const auto& w : out.report.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << report_table(out.report);
  return 0;
}

int gen_corpus_command(const SyntheticOptions& opts, const std::string& ontology, const std::string& out) {
  auto onto = load_ontology(ontology);
  write_synthetic_corpus(generate_synthetic_corpus(opts, onto), out);
  std::cout << "wrote " << opts.n_patients << " patients to " << out << "\n";
  return 0;
}

int verify_tables_command(const std::string& path) {
  auto tables = PaperTables::load(path);
  int bad = 0;
  for (const auto& c : check_f1_cells(tables)) {
    if (c.pass) continue;
    ++bad;
    std::printf("FAIL F1 %s %s %s: P=%.2f R=%.2f gives %.3f, reported %.2f\n", c.setup.c_str(), c.model.c_str(),
                std::string(variable_name(c.variable)).c_str(), c.precision, c.recall, c.computed_f1, c.reported_f1);
  }
  for (const auto& m : check_macro_rows(tables)) {
    std::printf("%s macro %s %s: mean %.4f, reported %.2f\n", m.pass ? "ok  " : "FAIL", m.setup.c_str(),
                m.model.c_str(), m.computed, m.reported);
    bad += !m.pass;
  }
  std::printf("%d inconsistencies\n", bad);
  return bad == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medrec: clinical variable abstraction"};
  app.require_subcommand(1);
  const std::string data = MEDREC_DATA_DIR;

  RunConfig cfg;
  cfg.ontology = data + "/ontology.txt";
  cfg.questions = data + "/questions.txt";
  cfg.gazetteer = data + "/gazetteer.txt";
  std::string setup = "nlp", corpus, gold, ontology = cfg.ontology.string(), questions = cfg.questions.string(),
              gazetteer = cfg.gazetteer.string(), out;
  auto* run = app.add_subcommand("run", "run one setup over a corpus and score it");
  run->add_option("--setup", setup, "nlp | ret | gen | retgen | standalone")->capture_default_str();
  run->add_option("--corpus", corpus, "directory of <patient>/<record>.txt")->required();
  run->add_option("--gold", gold, "gold standard TSV")->required();
  run->add_option("--ontology", ontology)->capture_default_str();
  run->add_option("--questions", questions)->capture_default_str();
  run->add_option("--gazetteer", gazetteer, "names list for de-identification")->capture_default_str();
  run->add_option("--embedder", cfg.embedder, "mock | http:URL | none")->capture_default_str();
  run->add_option("--generator", cfg.generator, "mock | http:URL | none")->capture_default_str();
  run->add_option("--anomaly", cfg.anomaly_modes, "mock generator modes: none, all or a comma list")
      ->capture_default_str();
  run->add_option("--chunk-size", cfg.chunk_size)->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--k", cfg.k)->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--tau", cfg.tau)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  run->add_option("--temperature", cfg.temperature)->capture_default_str();
  run->add_option("--context-budget", cfg.context_budget)->capture_default_str();
  run->add_option("--seed", cfg.seed)->capture_default_str();
  run->add_option("--workers", cfg.workers, "0 uses every core")->capture_default_str();
  run->add_flag("--embedding-segmenter,!--no-embedding-segmenter", cfg.embedding_segmenter);
  run->add_option("--segment-min-len", cfg.segment_min_len)->capture_default_str();
  run->add_option("--out", out, "directory for report.json, report.txt and predictions.json");

  SyntheticOptions syn;
  std::string syn_out, syn_onto = cfg.ontology.string();
  auto* gen = app.add_subcommand("gen-corpus", "write a synthetic corpus with its gold standard");
  gen->add_option("--seed", syn.seed)->capture_default_str();
  gen->add_option("--patients", syn.n_patients)->capture_default_str();
  gen->add_flag("--distractors", syn.distractors);
  gen->add_option("--ontology", syn_onto)->capture_default_str();
  gen->add_option("--out", syn_out)->required();

  std::string tables = data + "/paper_tables.tsv";
  auto* verify = app.add_subcommand("verify-tables", "recompute F1 cells and macro averages of the published tables");
  verify->add_option("--tables", tables)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto s = parse_setup(setup);
      if (!s) {
        std::cerr << "error: unknown setup " << setup << "\n";
        return 2;
      }
      cfg.setup = *s;
      cfg.corpus = corpus;
      cfg.gold = gold;
      cfg.ontology = ontology;
      cfg.questions = questions;
      cfg.gazetteer = gazetteer;
      cfg.out = out;
      return run_command(cfg);
    }
    if (*gen) return gen_corpus_command(syn, syn_onto, syn_out);
    if (*verify) return verify_tables_command(tables);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
