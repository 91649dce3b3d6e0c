// Command-line surface over the spinitc library: build a network from a
// chain description or a spec file, run the requested analyses, and emit a
// JSON report plus optional CSV series. Node and class indices are 1-based
// everywhere on this surface; the library underneath is 0-based.

#include <CLI11.hpp>

#include <spinitc/spinitc.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace spinitc;

struct Options {
    // network source
    bool use_chain = false;
    std::string kind = "xx";
    int n = 0;
    double j = 1.0;
    std::string spec_path;

    // analyses
    bool want_itc = false;
    bool want_geometry = false;
    bool want_cluster = false;
    bool want_control = false;
    bool want_attain = false;
    bool want_series = false;

    // shared pair
    int from = 0;  // 1-based; 0 = unset
    int to = 0;

    // geometry
    double alpha = 2.0;
    int anchor = 0;  // 1-based class index; 0 = last
    std::int64_t gromov_budget = 2000000;

    // control
    int site = 1;
    double strength = 2.0;
    int segments = 8;
    double horizon = 30.0;
    int restarts = 20;

    // attainability / series
    double eps = -1.0;
    double tmax = -1.0;  // <0 = unset
    double dt = -1.0;

    // tolerances
    double zero_tol = 1e-6;
    double rank_tol = 1e-8;
    double degeneracy_tol = -1.0;  // <=0 selects the per-matrix default
    double triangle_tol = 1e-9;
    int max_coeff = 5;
    double relation_tol = 1e-9;
    double relation_budget = 1e8;

    std::uint64_t seed = 12345;

    std::string out_path;
    std::string csv_prefix;
};

Json int_array(const std::vector<int>& xs, int offset) {
    Json arr = Json::array();
    for (int x : xs) arr.push(static_cast<std::int64_t>(x) + offset);
    return arr;
}

Json classes_json(const std::vector<std::vector<int>>& classes) {
    Json arr = Json::array();
    for (const auto& cls : classes) arr.push(int_array(cls, 1));
    return arr;
}

Json quad_json(const GromovQuad& q) {
    Json j = Json::object();
    Json members = Json::array();
    members.push(std::int64_t{q.w + 1}).push(std::int64_t{q.x + 1});
    members.push(std::int64_t{q.y + 1}).push(std::int64_t{q.z + 1});
    j.set("quad", std::move(members));
    j.set("l", q.l);
    j.set("m", q.m);
    j.set("s", q.s);
    j.set("delta", q.delta);
    j.set("scaled_delta", q.scaled);
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw invalid_input("failed while writing '" + path + "'");
}

void require_pair(const Options& opt, int n, const char* analysis) {
    if (opt.from < 1 || opt.to < 1)
        throw invalid_input(std::string(analysis) + " needs --from and --to (1-based nodes)");
    if (opt.from > n || opt.to > n)
        throw invalid_input("--from/--to out of range; the network has " + std::to_string(n) +
                            " nodes");
}

SpinNetwork load_network(const Options& opt) {
    if (opt.use_chain) {
        CouplingKind kind = opt.kind == "xx" ? CouplingKind::XX : CouplingKind::Heisenberg;
        return build_chain(opt.n, kind, opt.j);
    }
    std::ifstream in(opt.spec_path, std::ios::binary);
    if (!in) throw invalid_input("cannot read spec file '" + opt.spec_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_network_spec(buffer.str());
}

int run(const Options& opt) {
    SpinNetwork net = load_network(opt);
    validate_network(net);
    const int n = net.n;

    Json report = Json::object();
    {
        Json meta = Json::object();
        meta.set("version", kVersion);
        meta.set("kind", to_string(net.kind));
        meta.set("n", std::int64_t{n});
        meta.set("seed", opt.seed);
        Json tols = Json::object();
        tols.set("zero_tol", opt.zero_tol);
        tols.set("rank_tol", opt.rank_tol);
        tols.set("degeneracy_tol", opt.degeneracy_tol);
        tols.set("triangle_tol", opt.triangle_tol);
        tols.set("max_coeff", std::int64_t{opt.max_coeff});
        tols.set("relation_tol", opt.relation_tol);
        tols.set("relation_budget", opt.relation_budget);
        tols.set("gromov_budget", std::int64_t{opt.gromov_budget});
        meta.set("tolerances", std::move(tols));
        report.set("meta", std::move(meta));
    }

    const bool need_itc = opt.want_itc || opt.want_geometry || opt.want_cluster;
    std::optional<ITCMatrix> itc;
    if (need_itc) itc = itc_matrix(net, opt.degeneracy_tol);

    if (opt.want_itc) {
        Json section = Json::object();
        section.set("p_max", matrix_json(itc->p_max));
        section.set("dist", matrix_json(itc->dist));
        report.set("itc", std::move(section));
        if (!opt.csv_prefix.empty()) {
            std::ostringstream csv;
            csv_write_matrix(csv, itc->dist);
            write_file(opt.csv_prefix + "_dist.csv", csv.str());
        }
    }

    if (opt.want_geometry) {
        Json section = Json::object();
        auto classes = equivalence_classes(*itc, opt.zero_tol);
        const int m = static_cast<int>(classes.size());
        section.set("classes", classes_json(classes));

        QuotientMetric q = quotient_metric(*itc, classes, opt.zero_tol);
        {
            Json quotient = Json::object();
            quotient.set("dist", matrix_json(q.dist));
            quotient.set("max_spread", q.max_spread);
            quotient.set("spread_warning", q.spread_warning);
            section.set("quotient", std::move(quotient));
        }

        {
            TriangleAudit audit = triangle_audit(q.dist, opt.triangle_tol);
            Json tj = Json::object();
            tj.set("triples", audit.triples);
            tj.set("min_excess", audit.min_excess);
            tj.set("violation_count", static_cast<std::int64_t>(audit.violations.size()));
            Json shown = Json::array();
            for (std::size_t k = 0; k < audit.violations.size() && k < 100; ++k) {
                const auto& v = audit.violations[k];
                Json one = Json::object();
                one.set("i", std::int64_t{v.i + 1});
                one.set("j", std::int64_t{v.j + 1});
                one.set("k", std::int64_t{v.k + 1});
                one.set("excess", v.excess);
                shown.push(std::move(one));
            }
            tj.set("violations", std::move(shown));
            section.set("triangle", std::move(tj));
        }

        {
            const int anchor0 = opt.anchor == 0 ? m - 1 : opt.anchor - 1;
            if (anchor0 < 0 || anchor0 >= m)
                throw invalid_input("--anchor out of range; there are " + std::to_string(m) +
                                    " classes");
            section.set("anchor", std::int64_t{anchor0 + 1});
            Json embedding = Json::object();
            Matrix gram = gram_matrix(q.dist, anchor0);
            try {
                Embedding e = embedding_dimension(gram, opt.rank_tol);
                embedding.set("psd", true);
                embedding.set("dim", std::int64_t{e.dim});
                embedding.set("gram_eigenvalues", vector_json(e.gram_eigenvalues));
                embedding.set("coordinates", matrix_json(e.coordinates));
            } catch (const non_euclidean_error& e) {
                embedding.set("psd", false);
                embedding.set("most_negative", e.most_negative);
            }
            section.set("embedding", std::move(embedding));
        }

        GromovReport gromov = gromov_delta(q.dist, opt.gromov_budget, opt.seed);
        {
            Json gj = Json::object();
            gj.set("delta_max", gromov.delta_max);
            gj.set("scaled_delta_max", gromov.scaled_delta_max);
            gj.set("quadruple_count", gromov.quadruple_count);
            gj.set("sampled", gromov.sampled);
            if (gromov.quadruple_count > 0) {
                gj.set("best", quad_json(gromov.best));
                gj.set("best_scaled", quad_json(gromov.best_scaled));
            }
            section.set("gromov", std::move(gj));
        }

        InertiaReport node_inertia = inertia(itc->dist, opt.alpha);
        {
            Json ij = Json::object();
            ij.set("alpha", node_inertia.alpha);
            ij.set("values", vector_json(node_inertia.inertia));
            ij.set("gravity_centers", int_array(node_inertia.gravity_centers, 1));
            ij.set("anti_gravity_centers", int_array(node_inertia.anti_gravity_centers, 1));
            ij.set("skipped_infinite", node_inertia.skipped_infinite);
            section.set("inertia", std::move(ij));
        }

        report.set("geometry", std::move(section));

        if (!opt.csv_prefix.empty()) {
            {
                std::ostringstream csv;
                csv << "node,inertia\n";
                for (int i = 0; i < n; ++i)
                    csv << (i + 1) << ',' << fmt17(node_inertia.inertia(i)) << '\n';
                write_file(opt.csv_prefix + "_inertia.csv", csv.str());
            }
            {
                std::ostringstream csv;
                csv << "i,j,k,l,L,M,S,delta,scaled_delta\n";
                for (const auto& rec : gromov.records) {
                    csv << (rec.w + 1) << ',' << (rec.x + 1) << ',' << (rec.y + 1) << ','
                        << (rec.z + 1) << ',' << fmt17(rec.l) << ',' << fmt17(rec.m) << ','
                        << fmt17(rec.s) << ',' << fmt17(rec.delta) << ',' << fmt17(rec.scaled)
                        << '\n';
                }
                write_file(opt.csv_prefix + "_gromov.csv", csv.str());
            }
        }
    }

    if (opt.want_cluster) {
        ClusterTree tree = hierarchical_clusters(itc->dist);
        Json section = Json::object();
        Json thresholds = Json::array();
        for (double v : tree.thresholds) thresholds.push(v);
        section.set("thresholds", std::move(thresholds));
        Json clusters = Json::array();
        for (std::size_t c = 0; c < tree.clusters.size(); ++c) {
            const Cluster& cl = tree.clusters[c];
            Json one = Json::object();
            one.set("id", static_cast<std::int64_t>(c) + 1);
            one.set("members", int_array(cl.members, 1));
            one.set("birth", cl.birth);
            one.set("valid", cl.valid);
            one.set("parent", cl.parent >= 0 ? Json(std::int64_t{cl.parent + 1}) : Json());
            clusters.push(std::move(one));
        }
        section.set("clusters", std::move(clusters));
        report.set("clusters", std::move(section));

        if (!opt.csv_prefix.empty()) {
            std::ostringstream csv;
            csv << "id,parent,birth,valid,members\n";
            for (std::size_t c = 0; c < tree.clusters.size(); ++c) {
                const Cluster& cl = tree.clusters[c];
                csv << (c + 1) << ',' << (cl.parent >= 0 ? cl.parent + 1 : -1) << ','
                    << fmt17(cl.birth) << ',' << (cl.valid ? 1 : 0) << ',';
                for (std::size_t k = 0; k < cl.members.size(); ++k) {
                    if (k > 0) csv << ' ';
                    csv << cl.members[k] + 1;
                }
                csv << '\n';
            }
            write_file(opt.csv_prefix + "_dendrogram.csv", csv.str());
        }
    }

    std::optional<Matrix> h0;
    auto hamiltonian = [&]() -> const Matrix& {
        if (!h0) h0 = single_excitation_hamiltonian(net);
        return *h0;
    };

    if (opt.want_control) {
        require_pair(opt, n, "--control");
        if (opt.site < 1 || opt.site > n)
            throw invalid_input("--site out of range; the network has " + std::to_string(n) +
                                " nodes");
        const Matrix& h = hamiltonian();
        Matrix h1 = control_hamiltonian(net, opt.site - 1, opt.strength);
        OptimizerConfig cfg;
        cfg.restarts = opt.restarts;
        cfg.seed = opt.seed;
        ControlSequence seq =
            optimize_switching(h, h1, opt.from - 1, opt.to - 1, opt.segments, opt.horizon, cfg);
        seq.site = opt.site - 1;
        seq.strength = opt.strength;

        const double replay =
            controlled_transfer_probability(h, h1, seq, opt.from - 1, opt.to - 1);
        Spectrum free_spec = eigendecompose(h, opt.degeneracy_tol);
        const double free_cap = max_transfer_probability(free_spec, opt.from - 1, opt.to - 1);

        Json section = Json::object();
        section.set("from", std::int64_t{opt.from});
        section.set("to", std::int64_t{opt.to});
        section.set("segments", std::int64_t{opt.segments});
        section.set("horizon", opt.horizon);
        section.set("restarts", std::int64_t{opt.restarts});
        section.set("sequence", control_sequence_json(seq));
        section.set("replay_p", replay);
        section.set("replay_diff", std::abs(replay - seq.achieved_p));
        section.set("free_cap", free_cap);
        section.set("beats_cap", seq.achieved_p > free_cap);

        if (seq.final_time > 0.0) {
            CMatrix u = piecewise_evolution(h, h1, seq);
            EffectiveHamiltonian eff = effective_hamiltonian(u, seq.final_time);
            CMatrix back = hermitian_propagator(eff.h_eff, seq.final_time);
            ITCMatrix peff = effective_itc(eff);
            Json ej = Json::object();
            ej.set("horizon", eff.horizon);
            ej.set("branch_warning", eff.branch_warning);
            ej.set("schur_offdiag", eff.schur_offdiag);
            ej.set("roundtrip_error", (back - u).cwiseAbs().maxCoeff());
            ej.set("p_eff_pair", peff.p_max(opt.from - 1, opt.to - 1));
            ej.set("p_eff", matrix_json(peff.p_max));
            section.set("effective", std::move(ej));
        }
        report.set("control", std::move(section));
    }

    if (opt.want_attain) {
        require_pair(opt, n, "--attain");
        if (!(opt.eps > 0.0)) throw invalid_input("--attain needs --eps > 0");
        const double tmax = opt.tmax > 0.0 ? opt.tmax : 1e4;
        const double dt = opt.dt > 0.0 ? opt.dt : 0.01;
        Spectrum s = eigendecompose(hamiltonian(), opt.degeneracy_tol);
        const int groups = static_cast<int>(s.groups.size());

        Json section = Json::object();
        section.set("from", std::int64_t{opt.from});
        section.set("to", std::int64_t{opt.to});
        section.set("epsilon", opt.eps);
        section.set("t_max", tmax);
        section.set("dt", dt);
        section.set("p_max_pair", max_transfer_probability(s, opt.from - 1, opt.to - 1));
        section.set("distinct_groups", std::int64_t{groups});
        section.set("phase_tolerance", phase_tolerance(opt.eps, groups));
        {
            TimeEstimate est = attainment_time_estimate(opt.eps, groups);
            Json ej = Json::object();
            ej.set("steps", est.steps);
            ej.set("overflow", est.overflow);
            section.set("estimate", std::move(ej));
        }
        {
            // One representative eigenvalue per distinct group; duplicates
            // would only add trivial relations.
            std::vector<double> reps;
            reps.reserve(static_cast<std::size_t>(groups));
            for (const auto& [begin, end] : s.groups) reps.push_back(s.eigenvalues(begin));
            Json rj = Json::object();
            rj.set("include_unit", true);
            try {
                auto relations = rational_independence_check(reps, true, opt.max_coeff,
                                                             opt.relation_tol,
                                                             opt.relation_budget);
                rj.set("count", static_cast<std::int64_t>(relations.size()));
                Json list = Json::array();
                for (std::size_t k = 0; k < relations.size() && k < 100; ++k) {
                    Json one = Json::object();
                    one.set("coefficients", int_array(relations[k].coefficients, 0));
                    one.set("residual", relations[k].residual);
                    list.push(std::move(one));
                }
                rj.set("relations", std::move(list));
            } catch (const budget_exceeded& e) {
                rj.set("skipped", true);
                rj.set("note", e.what());
            }
            section.set("relations", std::move(rj));
        }
        {
            auto hit = find_attainment_time(s, opt.from - 1, opt.to - 1, opt.eps, tmax, dt);
            section.set("found", hit.has_value());
            if (hit) {
                section.set("t", hit->t);
                section.set("p", hit->p);
                Json residuals = Json::array();
                for (double r : hit->phase_residuals) residuals.push(r);
                section.set("phase_residuals", std::move(residuals));
            }
        }
        report.set("attainability", std::move(section));
    }

    if (opt.want_series) {
        require_pair(opt, n, "--series");
        if (!(opt.tmax > 0.0) || !(opt.dt > 0.0))
            throw invalid_input("--series needs --tmax and --dt");
        Spectrum s = eigendecompose(hamiltonian(), opt.degeneracy_tol);
        auto series = probability_time_series(s, opt.from - 1, opt.to - 1, opt.tmax, opt.dt);
        double max_p = 0.0, argmax_t = 0.0;
        for (const auto& [t, p] : series) {
            if (p > max_p) {
                max_p = p;
                argmax_t = t;
            }
        }
        Json section = Json::object();
        section.set("from", std::int64_t{opt.from});
        section.set("to", std::int64_t{opt.to});
        section.set("t_max", opt.tmax);
        section.set("dt", opt.dt);
        section.set("samples", static_cast<std::int64_t>(series.size()));
        section.set("max_p", max_p);
        section.set("argmax_t", argmax_t);
        report.set("series", std::move(section));

        if (!opt.csv_prefix.empty()) {
            std::ostringstream csv;
            csv << "t,p\n";
            for (const auto& [t, p] : series) csv << fmt17(t) << ',' << fmt17(p) << '\n';
            write_file(opt.csv_prefix + "_series.csv", csv.str());
        }
    }

    const std::string text = report.dump();
    if (opt.out_path.empty())
        std::cout << text;
    else
        write_file(opt.out_path, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"Information transfer capacity analysis for spin networks"};

    CLI::App* chain = app.add_subcommand("chain", "uniform open chain");
    chain->add_option("--kind", opt.kind, "coupling kind")
        ->required()
        ->check(CLI::IsMember({"xx", "heisenberg"}));
    chain->add_option("--n", opt.n, "number of spins")->required();
    chain->add_option("--j", opt.j, "nearest-neighbour coupling")->capture_default_str();
    chain->fallthrough();

    CLI::App* network = app.add_subcommand("network", "network from a JSON spec file");
    network->add_option("--spec", opt.spec_path, "spec file path")->required();
    network->fallthrough();

    app.require_subcommand(1);

    app.add_flag("--itc", opt.want_itc, "transfer capacity and distance matrices");
    app.add_flag("--geometry", opt.want_geometry,
                 "classes, quotient metric, embedding, gromov delta, inertia");
    app.add_flag("--cluster", opt.want_cluster, "hierarchical threshold clustering");
    app.add_flag("--control", opt.want_control, "bang-bang switching optimization");
    app.add_flag("--attain", opt.want_attain, "attainment time search and phase diagnostics");
    app.add_flag("--series", opt.want_series, "transfer probability time series");

    app.add_option("--from", opt.from, "source node (1-based)");
    app.add_option("--to", opt.to, "target node (1-based)");

    app.add_option("--alpha", opt.alpha, "inertia exponent")->capture_default_str();
    app.add_option("--anchor", opt.anchor, "gram anchor class (1-based; default last)");
    app.add_option("--gromov-budget", opt.gromov_budget, "max quadruples before sampling")->capture_default_str();

    app.add_option("--site", opt.site, "control site (1-based)")->capture_default_str();
    app.add_option("--strength", opt.strength, "control field strength")->capture_default_str();
    app.add_option("--segments", opt.segments, "bang-bang segment count")->capture_default_str();
    app.add_option("--horizon", opt.horizon, "control time horizon")->capture_default_str();
    app.add_option("--restarts", opt.restarts, "optimizer restarts")->capture_default_str();

    app.add_option("--eps", opt.eps, "attainment tolerance");
    app.add_option("--tmax", opt.tmax, "scan end time");
    app.add_option("--dt", opt.dt, "scan step");

    app.add_option("--zero-tol", opt.zero_tol, "equivalence class distance tolerance")->capture_default_str();
    app.add_option("--rank-tol", opt.rank_tol, "gram eigenvalue rank tolerance")->capture_default_str();
    app.add_option("--degeneracy-tol", opt.degeneracy_tol,
                   "eigenvalue grouping tolerance (<=0: 1e-9 * spectral norm)")->capture_default_str();
    app.add_option("--triangle-tol", opt.triangle_tol, "triangle violation tolerance")->capture_default_str();
    app.add_option("--max-coeff", opt.max_coeff, "relation search coefficient bound")->capture_default_str();
    app.add_option("--relation-tol", opt.relation_tol, "relation residual tolerance")->capture_default_str();
    app.add_option("--relation-budget", opt.relation_budget, "relation search budget")->capture_default_str();

    app.add_option("--seed", opt.seed, "seed for sampling and the optimizer")->capture_default_str();
    app.add_option("--out", opt.out_path, "write the JSON report here (default stdout)");
    app.add_option("--csv", opt.csv_prefix, "prefix for CSV outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return 0;
        }
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    opt.use_chain = chain->parsed();

    try {
        return run(opt);
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
}
