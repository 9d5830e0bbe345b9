// nfvsim: run, sweep, plot and validate service-chain provisioning scenarios.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime invariant violation.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nfv/nfv.hpp"

namespace {

constexpr int exit_config = 1;
constexpr int exit_invariant = 2;

void print_summary(nfv::SimulationResult const& r)
{
    auto const aar = r.stat(&nfv::RunSummary::aar_total);
    auto const anuc = r.stat(&nfv::RunSummary::anuc_total);
    auto const final_aar = r.stat(&nfv::RunSummary::final_aar);
    std::printf("policy=%s repetitions=%zu  AAR %.4f +- %.4f  ANUC %.2f +- %.2f  final-window AAR %.4f\n",
                nfv::to_string(r.config.policy).c_str(), r.runs.size(), aar.mean, aar.std, anuc.mean, anuc.std,
                final_aar.mean);
}

nfv::RunConfig load(std::string const& path, std::optional<std::uint64_t> seed, std::string const& policy)
{
    nfv::RunConfig c = nfv::load_config(path);
    if (seed) {
        c.seed = *seed;
    }
    if (!policy.empty()) {
        c.policy = nfv::parse_policy(policy);
    }
    nfv::validate(c);
    return c;
}

std::vector<nlohmann::json> parse_values(std::string const& csv)
{
    std::vector<nlohmann::json> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t const comma = csv.find(',', start);
        std::string const item = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (item.empty()) {
            throw nfv::ConfigError("empty entry in --values");
        }
        nlohmann::json v = nlohmann::json::parse(item, nullptr, false);
        out.push_back(v.is_discarded() ? nlohmann::json(item) : v);
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Online service-chain provisioning simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string policy;
    std::string out_dir = "out";

    auto* simulate = app.add_subcommand("simulate", "Run every Monte Carlo repetition of one configuration");
    simulate->add_option("--config", config_path, "Run configuration (JSON)")->required();
    simulate->add_option("--seed", seed, "Master seed (overrides the config)");
    simulate->add_option("--policy", policy, "dqn, greedy, tabu or oracle")
        ->check(CLI::IsMember({"dqn", "greedy", "tabu", "oracle"}));
    simulate->add_option("--out", out_dir, "Output directory")->capture_default_str();

    std::string param;
    std::string values;
    auto* sweep = app.add_subcommand("sweep", "Repeat a simulation for several values of one parameter");
    sweep->add_option("--config", config_path, "Base configuration (JSON)")->required();
    sweep->add_option("--param", param, "Parameter name, e.g. arrival_mean or engine.w_cost")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--seed", seed, "Master seed (overrides the config)");
    sweep->add_option("--policy", policy, "dqn, greedy, tabu or oracle")
        ->check(CLI::IsMember({"dqn", "greedy", "tabu", "oracle"}));
    sweep->add_option("--out", out_dir, "Output directory")->capture_default_str();

    std::string in_dir;
    auto* plot = app.add_subcommand("plot", "Render SVG plots from a run or sweep directory");
    plot->add_option("--in", in_dir, "Directory holding metrics.csv or sweep.csv")->required();

    auto* validate = app.add_subcommand("validate", "Check a configuration and build its scenario without running");
    validate->add_option("--config", config_path, "Run configuration (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*simulate) {
            nfv::RunConfig const c = load(config_path, seed, policy);
            auto const result = nfv::run_simulation(c);
            nfv::emit_outputs(result, out_dir);
            nfv::plot_directory(out_dir);
            print_summary(result);
            std::printf("wrote %s\n", out_dir.c_str());
        } else if (*sweep) {
            nfv::RunConfig const c = load(config_path, seed, policy);
            auto const vals = parse_values(values);
            std::filesystem::path const root(out_dir);
            auto points = nfv::sweep(c, param, vals, [&](nfv::SweepPoint const& p) {
                std::string v = p.value.is_string() ? p.value.get<std::string>() : p.value.dump();
                auto const dir = root / (param + "=" + v);
                nfv::emit_outputs(p.result, dir);
                std::printf("%s=%s: ", param.c_str(), v.c_str());
                print_summary(p.result);
            });
            std::filesystem::create_directories(root);
            nfv::write_file(root / "sweep.csv", nfv::sweep_csv(param, points));
            nfv::plot_directory(root);
            std::printf("wrote %s\n", (root / "sweep.csv").c_str());
        } else if (*plot) {
            for (auto const& f : nfv::plot_directory(in_dir)) {
                std::printf("wrote %s\n", f.c_str());
            }
        } else if (*validate) {
            nfv::RunConfig const c = load(config_path, seed, policy);
            nfv::Scenario const sc = nfv::build_scenario(c);
            nfv::ResourceLedger const ledger(sc.topology);
            if (!ledger.conserved() || !ledger.at_full_capacity()) {
                throw nfv::InvariantViolation("fresh ledger is not at full capacity");
            }
            nfv::PolicyEnv const env{&sc.topology, &sc.weights, c.engine, sc.catalog.size()};
            std::unique_ptr<nfv::DqnAgent> agent;
            if (c.policy == nfv::PolicyKind::dqn) {
                agent = std::make_unique<nfv::DqnAgent>(
                    nfv::state_size(sc.topology),
                    nfv::action_space_size(sc.topology, c.engine.node_vm_action_space), c.dqn, 0);
            }
            nfv::make_policy(c, env, agent.get(), 0);
            std::printf("config ok (hash %s): %zu nodes, %zu VMs, %zu links, %zu services, state %zu, actions %zu\n",
                        nfv::config_hash(c).c_str(), sc.topology.node_count(), sc.topology.vm_count(),
                        sc.topology.link_count(), sc.catalog.size(), nfv::state_size(sc.topology),
                        nfv::action_space_size(sc.topology, c.engine.node_vm_action_space));
        }
    } catch (nfv::InvariantViolation const& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return exit_invariant;
    } catch (nfv::ConfigError const& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (nfv::TopologyError const& e) {
        std::fprintf(stderr, "topology error: %s\n", e.what());
        return exit_config;
    } catch (std::invalid_argument const& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (std::exception const& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return exit_invariant;
    }
    return 0;
}
