// kdsim command line: scenario validation and execution, parameter
// sweeps, closed-form oracle exports and plot-data emission.
//
// Exit codes: 0 success, 2 invalid configuration, 3 numeric
// instability, 4 I/O failure.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kdsim/kdsim.hpp"

namespace {

using namespace kdsim;

int cmd_validate(const std::string& path) {
  Scenario sc = load_scenario(path);
  auto diags = validate_config(sc.config);
  if (diags.empty()) {
    std::printf("ok: %s (config hash %s)\n", sc.name.c_str(),
                scenario_config_hash(sc).c_str());
    return 0;
  }
  for (const auto& d : diags)
    std::fprintf(stderr, "error: %s: %s\n", d.path.c_str(), d.message.c_str());
  return 2;
}

int cmd_run(const std::string& path, const std::string& root_override) {
  Scenario sc = load_scenario(path);
  fs::path root = root_override.empty() ? output_root() : fs::path(root_override);
  RunOutputs out = run_scenario(sc, root);
  std::printf("%s: wrote %zu files under %s (norm %.9f, absorbed %.3e)\n",
              sc.name.c_str(), out.manifest.files.size(), out.dir.string().c_str(),
              out.manifest.final_norm, out.manifest.absorbed_fraction);
  if (!out.manifest.completed) {
    std::fprintf(stderr, "warning: wall budget exceeded, run checkpointed early\n");
  }
  return 0;
}

int cmd_sweep(const std::string& path, const std::vector<std::string>& axis_specs,
              const std::string& root_override, unsigned jobs, bool resume) {
  json doc = json::parse(read_file(path));
  std::vector<SweepAxis> axes;
  for (const auto& spec : axis_specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--axis", "expected <json-pointer>=v1,v2,...");
    SweepAxis ax;
    ax.pointer = spec.substr(0, eq);
    std::string values = spec.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= values.size()) {
      auto comma = values.find(',', pos);
      std::string tok = values.substr(pos, comma == std::string::npos
                                               ? std::string::npos
                                               : comma - pos);
      ax.values.push_back(json::parse(tok));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    axes.push_back(std::move(ax));
  }
  fs::path root = root_override.empty() ? output_root() : fs::path(root_override);
  SweepResult res = run_sweep(doc, axes, root, jobs, resume);
  int failed = 0;
  for (const auto& c : res.cells) {
    std::printf("%-48s %s%s\n", c.name.c_str(), c.ok ? "ok" : "FAILED",
                c.skipped ? " (resumed)" : "");
    if (!c.ok) ++failed;
  }
  std::printf("campaign dir: %s\n", res.campaign_dir.string().c_str());
  return failed == 0 ? 0 : 3;
}

BeamSpec oracle_beam(int mode, double lambda, double waist, double sigma,
                     double field) {
  BeamSpec b;
  b.mode_n = mode;
  b.wavelength = lambda;
  b.waist = waist;
  b.pulse_sigma = sigma;
  b.peak_field = field;
  return b;
}

void write_orders(const fs::path& out, const DiffractionDistribution& d) {
  std::string text = "# columns=order,probability  bessel_argument=" +
                     std::to_string(d.bessel_argument) + "\n";
  for (int m = -d.max_order; m <= d.max_order; ++m) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", m, d.p(m));
    text += buf;
  }
  write_file(out, text);
  std::printf("wrote %s\n", out.string().c_str());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"kdsim: electron wavepacket scattering at structured light fields"};
  app.require_subcommand(1);

  std::string scenario_path, out_root, out_path = "oracle.csv";
  std::vector<std::string> axis_specs;
  unsigned jobs = 0;
  bool resume = false;

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario_path)->required();

  auto* run = app.add_subcommand("run", "run a scenario");
  run->add_option("scenario", scenario_path)->required();
  run->add_option("--output-root", out_root, "override KDSIM_OUTPUT_ROOT");

  auto* sweep = app.add_subcommand("sweep", "run a scenario over parameter axes");
  sweep->add_option("scenario", scenario_path)->required();
  sweep->add_option("--axis", axis_specs, "<json-pointer>=v1,v2,...")->required();
  sweep->add_option("--jobs", jobs, "worker limit (default cores-1)");
  sweep->add_flag("--resume", resume, "skip cells with a finished manifest");
  sweep->add_option("--output-root", out_root);

  auto* plot = app.add_subcommand("plot", "emit max-normalized plot data for a run");
  plot->add_option("run_dir", scenario_path)->required();

  // oracle family
  auto* oracle = app.add_subcommand("oracle", "closed-form outputs");
  oracle->require_subcommand(1);
  double e0 = 10.0, lambda = 300.0, waist = 600.0, sigma = 10.0, energy_kev = 1.0;
  double w0_min = 450.0, w0_max = 1200.0;
  int orders = 64, mode_a = 1, mode_b = 0, npts = 501;
  double lambda_b = 300.0, waist_b = 600.0;
  std::string convention = "power_normalized";

  auto* vcw = oracle->add_subcommand("volkov-cw", "CW diffraction orders J_m^2");
  vcw->add_option("--e0", e0, "field amplitude, GV/m");
  vcw->add_option("--lambda", lambda, "nm");
  vcw->add_option("--w0", waist, "nm");
  vcw->add_option("--energy-kev", energy_kev);
  vcw->add_option("--orders", orders);
  vcw->add_option("--convention", convention, "power_normalized|peak_field");
  vcw->add_option("-o", out_path);

  auto* vp = oracle->add_subcommand("volkov-pulsed", "pulsed diffraction orders");
  vp->add_option("--e0", e0, "field amplitude, GV/m");
  vp->add_option("--lambda", lambda, "nm");
  vp->add_option("--tau", sigma, "pulse sigma, fs");
  vp->add_option("--orders", orders);
  vp->add_option("-o", out_path);

  auto* conv = oracle->add_subcommand("convolve", "pair spectrum convolution");
  conv->add_option("--mode-a", mode_a);
  conv->add_option("--mode-b", mode_b);
  conv->add_option("--lambda-a", lambda);
  conv->add_option("--lambda-b", lambda_b);
  conv->add_option("--waist-a", waist);
  conv->add_option("--waist-b", waist_b);
  conv->add_option("--points", npts);
  conv->add_option("-o", out_path);

  auto* rho = oracle->add_subcommand("rho", "Bragg/diffraction regime map");
  rho->add_option("--lambda", lambda);
  rho->add_option("--energy-kev", energy_kev);
  rho->add_option("--w0-min", w0_min);
  rho->add_option("--w0-max", w0_max);
  rho->add_option("--points", npts);
  rho->add_option("-o", out_path);

  auto* cmap = oracle->add_subcommand("compton-map", "inelastic condition map");
  std::string kind = "v-tau";
  cmap->add_option("--kind", kind, "v-tau|lambda-tau");
  cmap->add_option("--lambda", lambda);
  cmap->add_option("--w0", waist);
  cmap->add_option("--energy-kev", energy_kev);
  cmap->add_option("-o", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(scenario_path);
    if (run->parsed()) return cmd_run(scenario_path, out_root);
    if (sweep->parsed()) return cmd_sweep(scenario_path, axis_specs, out_root, jobs, resume);
    if (plot->parsed()) {
      auto files = emit_plot_data(scenario_path);
      for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
      return 0;
    }
    if (vcw->parsed()) {
      double v = electron_velocity({energy_kev * 1000.0, 1, 1, 0, 0});
      auto conv_sel = convention == "peak_field" ? AmplitudeConvention::peak_field
                                                 : AmplitudeConvention::power_normalized;
      write_orders(out_path, cw_orders(e0, waist, lambda, v, orders, conv_sel));
      return 0;
    }
    if (vp->parsed()) {
      write_orders(out_path, pulsed_orders(e0, lambda, sigma, orders));
      return 0;
    }
    if (conv->parsed()) {
      BeamSpec a = oracle_beam(mode_a, lambda, waist, 10.0, 1.0);
      BeamSpec b = oracle_beam(mode_b, lambda_b, waist_b, 10.0, 1.0);
      ConvolutionForm f = convolution_closed_form(a, b);
      double k_max = 4.0 * f.characteristic_k_perp();
      Spectrum s;
      s.kind = AxisKind::k_transverse;
      for (int i = 0; i < npts; ++i) {
        double k = -k_max + 2.0 * k_max * i / (npts - 1);
        s.axis.push_back(k);
        s.density.push_back(f.eval_signed(k));
      }
      write_spectrum_csv(out_path, s);
      std::printf("wrote %s (characteristic k_perp %.6g rad/nm)\n", out_path.c_str(),
                  f.characteristic_k_perp());
      return 0;
    }
    if (rho->parsed()) {
      double v = electron_velocity({energy_kev * 1000.0, 1, 1, 0, 0});
      std::string text = "# columns=w0_nm,rho,classification  lambda_nm=" +
                         std::to_string(lambda) + "\n";
      for (int i = 0; i < npts; ++i) {
        double w0 = w0_min + (w0_max - w0_min) * i / (npts - 1);
        RegimeReport r = regime_rho(w0, v, lambda);
        const char* c = r.classification == InteractionRegime::diffraction ? "diffraction"
                        : r.classification == InteractionRegime::bragg     ? "bragg"
                                                                           : "intermediate";
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s\n", w0, r.rho, c);
        text += buf;
      }
      write_file(out_path, text);
      std::printf("wrote %s\n", out_path.c_str());
      return 0;
    }
    if (cmap->parsed()) {
      BeamSpec b = oracle_beam(1, lambda, waist, 10.0, 1.0);
      std::vector<double> taus, rows;
      for (int i = 0; i < 64; ++i) taus.push_back(0.5 + 39.5 * i / 63.0);
      ComptonMap m;
      if (kind == "v-tau") {
        for (int i = 0; i < 64; ++i) {
          double kev = 0.2 + 29.8 * i / 63.0;
          rows.push_back(electron_velocity({kev * 1000.0, 1, 1, 0, 0}));
        }
        m = compton_map_velocity_tau(b, rows, taus);
      } else {
        double v = electron_velocity({energy_kev * 1000.0, 1, 1, 0, 0});
        for (int i = 0; i < 64; ++i) rows.push_back(100.0 + 900.0 * i / 63.0);
        m = compton_map_lambda_tau(b, v, rows, taus);
      }
      std::vector<double> data(m.satisfied.begin(), m.satisfied.end());
      Raw2DMeta meta;
      meta.shape = {rows.size(), taus.size()};
      meta.row_start = rows.front();
      meta.row_spacing = rows[1] - rows[0];
      meta.col_start = taus.front();
      meta.col_spacing = taus[1] - taus[0];
      meta.row_unit = kind == "v-tau" ? "nm/fs" : "nm";
      meta.col_unit = "fs";
      meta.value_unit = "bool (1 = satisfiable)";
      meta.kind = "compton_map";
      write_raw2d(fs::path(out_path).replace_extension(), data, meta);
      std::printf("wrote %s.{f64,json}\n",
                  fs::path(out_path).replace_extension().string().c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
