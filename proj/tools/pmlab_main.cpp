#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "pmlab/commands.hpp"

int main(int argc, char** argv) {
    using namespace pmlab::commands;

    CLI::App app{"pmlab: planted-matching laboratory"};
    app.require_subcommand(1);

    AlphaOptions alpha;
    auto* cmd_a = app.add_subcommand("alpha", "ODE overlap/weight curve over a lambda range");
    cmd_a->add_option("--lambda-min", alpha.lambda_min)->required();
    cmd_a->add_option("--lambda-max", alpha.lambda_max)->required();
    cmd_a->add_option("--steps", alpha.steps)->required();
    cmd_a->add_option("--out", alpha.out_path)->required();
    cmd_a->add_option("--mc-n", alpha.mc_n);
    cmd_a->add_option("--mc-trials", alpha.mc_trials);
    cmd_a->add_option("--seed", alpha.seed);
    cmd_a->add_option("--threads", alpha.threads);

    SimulateOptions sim;
    auto* cmd_s = app.add_subcommand("simulate", "Monte Carlo minimum-matching trials");
    cmd_s->add_option("--n", sim.n)->required();
    cmd_s->add_option("--lambda", sim.lambda)->required();
    cmd_s->add_option("--trials", sim.trials)->required();
    cmd_s->add_option("--seed", sim.seed)->required();
    cmd_s->add_option("--out", sim.out_path)->required();
    cmd_s->add_option("--threads", sim.threads);

    RdeOptions rde;
    auto* cmd_r = app.add_subcommand("rde", "population dynamics for the message distributions");
    cmd_r->add_option("--lambda", rde.lambda)->required();
    cmd_r->add_option("--pool", rde.pool)->required();
    cmd_r->add_option("--iters", rde.iters)->required();
    cmd_r->add_option("--seed", rde.seed)->required();
    cmd_r->add_option("--out", rde.out_path)->required();
    cmd_r->add_option("--threads", rde.threads);

    PwitOptions pwit;
    auto* cmd_p = app.add_subcommand("pwit", "message passing on truncated planted trees");
    cmd_p->add_option("--lambda", pwit.lambda)->required();
    cmd_p->add_option("--depth", pwit.depth)->required();
    cmd_p->add_option("--arity", pwit.arity)->required();
    cmd_p->add_option("--trials", pwit.trials)->required();
    cmd_p->add_option("--seed", pwit.seed)->required();
    cmd_p->add_option("--out", pwit.out_path)->required();
    cmd_p->add_option("--boundary", pwit.boundary)->check(CLI::IsMember({"ode", "rde"}));
    cmd_p->add_option("--threads", pwit.threads);

    BoundOptions bound;
    auto* cmd_b = app.add_subcommand("bound", "closed-form recovery bounds");
    cmd_b->add_option("--lambda", bound.lambda)->required();
    cmd_b->add_option("--n", bound.n)->required();
    cmd_b->add_option("--out", bound.out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kParamError;
    }

    try {
        if (cmd_a->parsed()) return cmd_alpha(alpha);
        if (cmd_s->parsed()) return cmd_simulate(sim);
        if (cmd_r->parsed()) return cmd_rde(rde);
        if (cmd_p->parsed()) return cmd_pwit(pwit);
        if (cmd_b->parsed()) return cmd_bound(bound);
    } catch (const std::invalid_argument& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kParamError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kParamError;
}
