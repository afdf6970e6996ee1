#include <iostream>

#include "CLI11.hpp"

#include "optomech/commands.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string trace;
  std::uint64_t seed = 0;
  std::string grid;
  bool track_detuning = false;
  std::size_t modes = 0;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "system configuration (JSON, frequencies in Hz)")->required();
  sub->add_option("--out", f.out, "output file, written atomically; stdout if omitted");
  sub->add_option("--seed", f.seed, "noise seed, overrides noise.seed");
  sub->add_option("--grid", f.grid, "frequency grid start,stop,points in Hz");
  sub->add_flag("--track-detuning", f.track_detuning,
                "keep the drive on the power-shifted red sideband");
  sub->add_option("--modes", f.modes, "use only the first N mechanical modes")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearized cavity optomechanics: response, eigenmodes, regimes and fitting"};
  app.require_subcommand(1);
  Flags f;
  struct Sub {
    const char* name;
    const char* help;
    bool needs_trace;
  };
  const Sub subs[] = {
      {"simulate", "write a model trace and print derived quantities", false},
      {"eigen", "eigenfrequency table over a coupling sweep", false},
      {"regime", "coupling regime report and optional boundary or trajectory table", false},
      {"fit", "fit a transmission trace and write the result record", true},
      {"reconstruct", "mechanical susceptibility from a transmission trace", true},
      {"sweep", "fit a power series and tabulate the extracted parameters", false},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, f);
    if (s.needs_trace) sub->add_option("trace", f.trace, "trace file")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(optomech::ExitCode::parse);
  }

  optomech::CommandOptions o;
  const CLI::App* chosen = app.get_subcommands().front();
  o.command = chosen->get_name();
  o.config = f.config;
  if (!f.out.empty()) o.out = f.out;
  if (!f.trace.empty()) o.trace = f.trace;
  if (chosen->count("--seed") > 0) o.seed = f.seed;
  if (!f.grid.empty()) o.grid = f.grid;
  o.track_detuning = f.track_detuning;
  if (f.modes > 0) o.modes = f.modes;
  return optomech::run_command(o, std::cout, std::cerr);
}
