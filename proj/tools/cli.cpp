#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tiara/attention.hpp"
#include "tiara/errors.hpp"
#include "tiara/io/config.hpp"
#include "tiara/io/tensor_file.hpp"
#include "tiara/io/text_formats.hpp"
#include "tiara/parallel.hpp"
#include "tiara/promptblend.hpp"
#include "tiara/verifier.hpp"

namespace tiara::cli {
namespace {

namespace fs = std::filesystem;
using io::Tensor;

// Theorem failure, as opposed to bad input.
struct TheoremFailure {
  std::string summary;
};

std::string flag_name(std::string_view key) {
  std::string name(key);
  std::ranges::replace(name, '.', '-');
  std::ranges::replace(name, '_', '-');
  return "--" + name;
}

/// --config plus one overriding flag per config key.
struct ConfigOptions {
  std::string config_path;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value configuration file");
    for (auto key : io::Config::keys())
      cmd->add_option(flag_name(key), overrides[std::string(key)],
                      "override config key " + std::string(key));
  }

  io::Config resolve() const {
    io::Config c = config_path.empty() ? io::Config{} : io::load_config(config_path);
    for (const auto& [key, value] : overrides)
      if (!value.empty()) c.set(key, value);
    c.validate();
    return c;
  }
};

std::string num(double v) { return io::format_double(v); }

std::size_t dim(const Tensor& t, std::size_t i) { return static_cast<std::size_t>(t.dims[i]); }

Matrix slice_matrix(const Tensor& t, std::size_t cell, std::size_t rows, std::size_t cols) {
  const auto begin = t.values.begin() + static_cast<std::ptrdiff_t>(cell * rows * cols);
  return Matrix(rows, cols, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(rows * cols)));
}

void require_rank4_square(const Tensor& t, const char* what) {
  if (t.rank() != 4 || t.dims[2] != t.dims[3])
    throw DomainError(std::string(what) + " must be a rank-4 (H,W,N,N) tensor, got " +
                      t.shape_string());
}

std::vector<attention::AttentionLogits> logits_field(const Tensor& t) {
  const std::size_t cells = dim(t, 0) * dim(t, 1);
  const std::size_t n = dim(t, 2);
  std::vector<attention::AttentionLogits> out;
  out.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) out.emplace_back(slice_matrix(t, c, n, n));
  return out;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  ConfigOptions config;
  std::string input, output, spectrogram;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const auto cfg = a.config.resolve();
  const Tensor in = io::read_tensor(a.input);
  require_rank4_square(in, "analyze input");
  const std::size_t h = dim(in, 0), w = dim(in, 1), n = dim(in, 2);
  const auto window = cfg.window();
  const auto band = cfg.band_for(n);
  const auto field = logits_field(in);
  const bool want_csv = !a.spectrogram.empty();

  Tensor rho{{h, w, n}, std::vector<double>(h * w * n)};
  std::vector<std::string> csv(field.size());
  parallel_for(field.size(), 0, [&](std::size_t c) {
    const auto attn = attention::softmax_rows(field[c]);
    const auto motion = attention::estimate_motion(attn, window, band);
    std::ranges::copy(motion.rho, rho.values.begin() + static_cast<std::ptrdiff_t>(c * n));
    if (!want_csv) return;
    std::string& text = csv[c];
    for (std::size_t i = 0; i < n; ++i) {
      const auto bins = attention::motion_spectrum(attn.row_signal(i), window, i, band.phi2);
      for (std::size_t k = 0; k < bins.size(); ++k)
        text += std::to_string(c / w) + ',' + std::to_string(c % w) + ',' + std::to_string(i) +
                ',' + std::to_string(k) + ',' + num(std::abs(bins[k])) + '\n';
    }
  });
  io::write_tensor(a.output, rho);
  if (want_csv) {
    std::string text = "h,w,i,k,magnitude\n";
    for (const auto& s : csv) text += s;
    io::write_file_atomic(a.spectrogram, text);
  }
  out << "analyze: " << h << "x" << w << " locations, " << n << " frames, band [" << band.phi1
      << ", " << band.phi2 << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- reweight

struct ReweightArgs {
  ConfigOptions config;
  std::string logits, values, output, attention_out;
};

int cmd_reweight(const ReweightArgs& a, std::ostream& out) {
  const auto cfg = a.config.resolve();
  const Tensor lt = io::read_tensor(a.logits);
  const Tensor vt = io::read_tensor(a.values);
  require_rank4_square(lt, "logits");
  if (vt.rank() != 4 || vt.dims[0] != lt.dims[0] || vt.dims[1] != lt.dims[1] ||
      vt.dims[2] != lt.dims[2])
    throw DomainError("values " + vt.shape_string() + " do not match logits " + lt.shape_string() +
                      "; expected (H,W,N,d_v) with the logits' H, W, N");
  const std::size_t h = dim(lt, 0), w = dim(lt, 1), n = dim(lt, 2), dv = dim(vt, 3);

  const auto logits = logits_field(lt);
  std::vector<attention::VideoLatentSlice> values;
  for (std::size_t c = 0; c < logits.size(); ++c) values.emplace_back(slice_matrix(vt, c, n, dv));

  auto options = cfg.tiara_options();
  options.band = cfg.band_for(n);
  const auto cells = attention::tiara(logits, values, options);

  Tensor outputs{{h, w, n, dv}, {}};
  Tensor maps{{h, w, n, n}, {}};
  for (const auto& cell : cells) {
    const auto o = cell.output.values().data();
    const auto m = cell.attention.matrix().data();
    outputs.values.insert(outputs.values.end(), o.begin(), o.end());
    maps.values.insert(maps.values.end(), m.begin(), m.end());
  }
  io::write_tensor(a.output, outputs);
  if (!a.attention_out.empty()) io::write_tensor(a.attention_out, maps);
  out << "reweight: " << h << "x" << w << " locations, " << n << " frames, d_v=" << dv << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verify-theorem

struct VerifyArgs {
  ConfigOptions config;
  std::string logits, values, report;
};

std::string report_section(const verifier::TheoremReport& r) {
  std::ostringstream s;
  s << "[N=" << r.frames << "]\n"
    << "frames=" << r.frames << "\n"
    << "eta=" << num(r.eta) << "\n"
    << "kappa_hat=" << num(r.kappa_hat) << "\n"
    << "a_min=" << num(r.a_min) << "\n"
    << "homogeneity=" << num(r.homogeneity) << "\n"
    << "value_bound=" << num(r.value_bound) << "\n"
    << "alpha=" << num(r.alpha) << "\n"
    << "iota=" << num(r.iota) << "\n"
    << "lambda=" << num(r.lambda_coef) << "\n"
    << "identity_residual=" << num(r.identity_residual) << "\n"
    << "error_floor=" << num(r.error_floor) << "\n"
    << "kappa_after=" << num(r.kappa_after) << "\n"
    << "max_ratio=" << num(r.max_ratio) << "\n"
    << "slack=" << num(r.slack) << "\n"
    << "pass=" << (r.pass ? "true" : "false") << "\n"
    << "tau,E_x,E_y,ratio\n";
  for (std::size_t tau = 0; tau < r.per_tau.size(); ++tau) {
    const auto& row = r.per_tau[tau];
    s << tau << ',' << num(row.e_x) << ',' << num(row.e_y) << ','
      << (row.ratio ? num(*row.ratio) : std::string("nan")) << '\n';
  }
  return s.str();
}

std::vector<verifier::TheoremInstance> theorem_instances(const VerifyArgs& a, const io::Config& cfg) {
  std::vector<verifier::TheoremInstance> out;
  const auto window = cfg.window();
  if (!a.logits.empty() || !a.values.empty()) {
    if (a.logits.empty() || a.values.empty())
      throw DomainError("--logits and --values must be given together");
    const Tensor lt = io::read_tensor(a.logits);
    const Tensor vt = io::read_tensor(a.values);
    const std::size_t n = dim(lt, lt.rank() - 1);
    if (lt.rank() < 2 || lt.values.size() != n * n || dim(lt, lt.rank() - 2) != n)
      throw DomainError("theorem logits must hold a single N x N map, got " + lt.shape_string());
    if (vt.values.size() != n)
      throw DomainError("theorem values " + vt.shape_string() + " must hold N=" +
                        std::to_string(n) + " scalars to match logits " + lt.shape_string());
    out.push_back(verifier::TheoremInstance::measure(
        attention::AttentionLogits(Matrix(n, n, lt.values)), vt.values, window, cfg.k_threshold,
        cfg.eta));
    return out;
  }
  for (auto n : cfg.sizes) {
    out.push_back(verifier::TheoremInstance::measure(
        verifier::gen_homogeneous_attention(n, cfg.decay),
        verifier::gen_inconsistent_values(n, cfg.value_bound, cfg.hf_amplitude, cfg.seed, cfg.hf_bin),
        window, cfg.k_threshold, cfg.eta));
  }
  return out;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto cfg = a.config.resolve();
  const auto instances = theorem_instances(a, cfg);

  std::string text;
  bool pass = true;
  std::vector<double> ratios;
  double last_slack = 0.0;
  std::string reason;
  for (const auto& inst : instances) {
    if (!inst.feasible) {
      const std::string why = inst.infeasibility();
      text += "[N=" + std::to_string(inst.attention.frames()) + "]\ninfeasible: " + why + "\n" +
              "kappa_hat=" + num(inst.kappa_hat) + "\na_min=" + num(inst.a_min) + "\n";
      if (reason.empty()) reason = "N=" + std::to_string(inst.attention.frames()) + " infeasible: " + why;
      pass = false;
      continue;
    }
    const auto r = verifier::verify_theorem(inst);
    text += report_section(r);
    ratios.push_back(r.max_ratio);
    last_slack = r.slack;
    if (!r.pass) {
      pass = false;
      if (reason.empty())
        reason = "N=" + std::to_string(r.frames) + " max_ratio exceeds eta + slack";
    }
  }
  for (std::size_t i = 1; i < ratios.size(); ++i)
    if (ratios[i] > ratios[i - 1] + 1e-9) {
      pass = false;
      if (reason.empty()) reason = "max_ratio increases with N";
    }

  const double final_ratio = ratios.empty() ? std::numeric_limits<double>::quiet_NaN() : ratios.back();
  const std::string summary = std::string(pass ? "PASS" : "FAIL") + " max_ratio=" +
                              num(final_ratio) + " eta=" + num(cfg.eta) + " slack=" +
                              num(last_slack);
  text += summary + "\n";
  if (!a.report.empty()) io::write_file_atomic(a.report, text);
  else out << text;
  if (!a.report.empty()) out << summary << "\n";
  if (!pass) throw TheoremFailure{summary + (reason.empty() ? "" : " (" + reason + ")")};
  return kExitOk;
}

// ---------------------------------------------------------------- blend

struct BlendArgs {
  ConfigOptions config;
  std::string prompts, spans, tokens, embeddings, output;
  std::optional<std::size_t> frame;
  double timestep = 0.0;
  std::size_t layer = 0;
  bool dump_all = false;
  bool strict = false;
};

int cmd_blend(const BlendArgs& a, std::ostream& out) {
  const auto cfg = a.config.resolve();
  const auto table = io::parse_token_table(io::read_text_file(a.tokens));
  const auto lines = io::parse_prompt_lines(io::read_text_file(a.prompts));
  const auto organized = io::organize(lines, table);
  const auto schedule = cfg.schedule(io::parse_spans(io::read_text_file(a.spans)));
  if (organized.size() != schedule.spans.size())
    throw DomainError(std::to_string(organized.size()) + " prompts but " +
                      std::to_string(schedule.spans.size()) + " spans");

  const auto aligned = promptblend::align(
      organized, a.strict ? promptblend::EmptyComponentPolicy::kReject
                          : promptblend::EmptyComponentPolicy::kBorrowLongest);
  const promptblend::EmbeddingTable embedder(io::matrix_from_tensor(io::read_tensor(a.embeddings)));
  std::vector<promptblend::EmbeddedPrompt> embedded;
  for (const auto& p : aligned.prompts) embedded.push_back(embedder.embed(p));

  const std::size_t len = aligned.total_length, d = embedder.dimension();
  Tensor result;
  if (a.dump_all) {
    const std::size_t frames = schedule.total_frames();
    result.dims = {frames, len, d};
    for (std::size_t n = 0; n < frames; ++n) {
      const auto c = promptblend::conditioning(schedule, embedded, n, a.timestep, a.layer);
      const auto m = c.matrix.data();
      result.values.insert(result.values.end(), m.begin(), m.end());
    }
  } else {
    if (!a.frame) throw DomainError("blend needs --frame or --dump-all");
    result = io::tensor_from_matrix(
        promptblend::conditioning(schedule, embedded, *a.frame, a.timestep, a.layer).matrix);
  }
  io::write_tensor(a.output, result);
  out << "blend: " << organized.size() << " prompts aligned to " << len << " tokens, output "
      << result.shape_string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  ConfigOptions config;
  std::string logits_out, values_out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto cfg = a.config.resolve();
  const std::size_t n = cfg.frames, h = cfg.height, w = cfg.width;
  const auto logits = verifier::gen_homogeneous_attention(n, cfg.decay);
  Tensor lt{{h, w, n, n}, {}};
  Tensor vt{{h, w, n, 1}, {}};
  const auto l = logits.scores().data();
  for (std::size_t c = 0; c < h * w; ++c) {
    lt.values.insert(lt.values.end(), l.begin(), l.end());
    // Each location draws from its own stream: seed + flattened index.
    const auto v = verifier::gen_inconsistent_values(n, cfg.value_bound, cfg.hf_amplitude,
                                                     cfg.seed + c, cfg.hf_bin);
    vt.values.insert(vt.values.end(), v.begin(), v.end());
  }
  io::write_tensor(a.logits_out, lt);
  io::write_tensor(a.values_out, vt);
  out << "synth: " << h << "x" << w << " locations, " << n << " frames, seed " << cfg.seed << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-frequency attention reweighting and prompt blending for long video generation",
               "tiara"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "motion intensity of every attention row");
  analyze.config.attach(c_analyze);
  c_analyze->add_option("--input", analyze.input, "logits field (H,W,N,N)")->required();
  c_analyze->add_option("--output", analyze.output, "rho field (H,W,N)")->required();
  c_analyze->add_option("--spectrogram", analyze.spectrogram, "CSV of h,w,i,k,magnitude");

  ReweightArgs reweight;
  auto* c_reweight = app.add_subcommand("reweight", "reweight temporal attention and apply it");
  reweight.config.attach(c_reweight);
  c_reweight->add_option("--logits", reweight.logits, "logits field (H,W,N,N)")->required();
  c_reweight->add_option("--values", reweight.values, "values field (H,W,N,d_v)")->required();
  c_reweight->add_option("--output", reweight.output, "outputs (H,W,N,d_v)")->required();
  c_reweight->add_option("--attention-out", reweight.attention_out, "attention maps (H,W,N,N)");

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify-theorem", "check the inconsistency bound numerically");
  verify.config.attach(c_verify);
  c_verify->add_option("--logits", verify.logits, "single N x N logits map");
  c_verify->add_option("--values", verify.values, "N scalar values");
  c_verify->add_option("--report", verify.report, "report path (default: stdout)");

  BlendArgs blend;
  auto* c_blend = app.add_subcommand("blend", "text conditioning for a frame, timestep and layer");
  blend.config.attach(c_blend);
  c_blend->add_option("--prompts", blend.prompts, "one $-organized prompt per line")->required();
  c_blend->add_option("--spans", blend.spans, "one \"start end\" frame span per line")->required();
  c_blend->add_option("--tokens", blend.tokens, "token<TAB>id table")->required();
  c_blend->add_option("--embeddings", blend.embeddings, "embedding table (vocab,d)")->required();
  c_blend->add_option("--output", blend.output, "conditioning tensor")->required();
  c_blend->add_option("--frame", blend.frame, "frame index n");
  c_blend->add_option("--timestep", blend.timestep, "denoising timestep t");
  c_blend->add_option("--layer", blend.layer, "U-Net layer index d");
  c_blend->add_flag("--dump-all", blend.dump_all, "every frame at the given t and d");
  c_blend->add_flag("--strict-alignment", blend.strict, "reject components empty in some prompts");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "synthetic homogeneous logits and values");
  synth.config.attach(c_synth);
  c_synth->add_option("--logits-out", synth.logits_out, "logits field (H,W,N,N)")->required();
  c_synth->add_option("--values-out", synth.values_out, "values field (H,W,N,1)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*c_analyze) return cmd_analyze(analyze, out);
    if (*c_reweight) return cmd_reweight(reweight, out);
    if (*c_verify) return cmd_verify(verify, out);
    if (*c_blend) return cmd_blend(blend, out);
    if (*c_synth) return cmd_synth(synth, out);
  } catch (const TheoremFailure& f) {
    err << "tiara: theorem check failed: " << f.summary << "\n";
    return kExitTheoremFailed;
  } catch (const IoError& e) {
    err << "tiara: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "tiara: parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const AlignmentError& e) {
    err << "tiara: alignment error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "tiara: invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "tiara: internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitValidation;
}

}  // namespace tiara::cli
