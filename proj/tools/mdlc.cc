/*
 * Copyright 2026 the mdlc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "mdlc/containment.hh"
#include "mdlc/tpct.hh"

namespace {

using namespace mdlc;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write '" + path + "'");
    out << content;
}

bool label_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '!' || c == '|' ||
           c == '-';
}

std::string balanced_group(const std::string& s, size_t& i) {
    size_t start = i;
    int depth = 0;
    for (; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')' && --depth == 0) {
            ++i;
            return s.substr(start, i - start);
        }
    }
    return s.substr(start);
}

// Labels occurring in a tree text (no alphabet needed yet).
void scan_tree_labels(const std::string& s, std::set<std::string>& out) {
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '(' ) {
            out.insert(balanced_group(s, i));
        } else if (label_char(c)) {
            size_t start = i;
            while (i < s.size() && label_char(s[i])) ++i;
            out.insert(s.substr(start, i - start));
        } else {
            ++i;
        }
    }
}

// Labels referenced via label_ atoms in a program text.
void scan_query_labels(const std::string& s, std::set<std::string>& out) {
    const std::string key = "label_";
    for (size_t i = 0; i + key.size() < s.size(); ++i) {
        bool word_start = i == 0 || !label_char(s[i - 1]);
        if (!word_start) continue;
        std::string pre = s.substr(i, key.size());
        std::transform(pre.begin(), pre.end(), pre.begin(), ::tolower);
        if (pre != key) continue;
        size_t j = i + key.size();
        if (j < s.size() && s[j] == '(') {
            out.insert(balanced_group(s, j));
        } else {
            size_t start = j;
            while (j < s.size() && label_char(s[j])) ++j;
            if (j > start) out.insert(s.substr(start, j - start));
        }
    }
}

struct Common {
    std::string schema = "tau_gk_child_desc";
    std::string alpha_path;

    AlphabetPtr alphabet(const std::vector<std::string>& texts) const {
        if (!alpha_path.empty()) return parse_alphabet(slurp(alpha_path));
        std::set<std::string> labels;
        for (const auto& t : texts) {
            scan_query_labels(t, labels);
        }
        if (labels.empty()) throw validation_error("cannot infer an alphabet; pass --alpha");
        return make_alphabet({labels.begin(), labels.end()});
    }
};

void write_stats(const std::string& path, const ContainmentVerdict& v) {
    if (path.empty()) return;
    std::ostringstream out;
    for (const auto& [k, val] : v.stats) out << k << "=" << val << "\n";
    for (const auto& line : v.stage_log) out << line << "\n";
    spit(path, out.str());
}

int run(int argc, char** argv) {
    CLI::App app{"monadic datalog on trees: evaluation, rewriting, automata, containment"};
    app.require_subcommand(1);

    Common common;
    size_t max_states = 2000000;
    long long max_sigma_n = 4096;

    auto add_common = [&](CLI::App* cmd, bool with_schema = true) {
        if (with_schema)
            cmd->add_option("--schema", common.schema,
                            "tree schema (tau_u, tau_u_root_leaf, tau_u_root_leaf_desc, "
                            "tau_o, tau_o_child, tau_gk, tau_gk_child, tau_gk_child_desc, tau_b)");
        cmd->add_option("--alpha", common.alpha_path, "alphabet file, one label per line");
        cmd->add_option("--max-states", max_states, "state/tuple ceiling for automata work");
        cmd->add_option("--max-sigma-n", max_sigma_n, "set-variable alphabet ceiling");
    };

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a query on a tree");
    std::string qpath, tpath;
    eval_cmd->add_option("query", qpath, ".mdl file")->required();
    eval_cmd->add_option("tree", tpath, ".tree file")->required();
    add_common(eval_cmd);

    // normalize
    auto* norm_cmd = app.add_subcommand("normalize", "apply a named rewriting");
    std::string op;
    std::vector<std::string> norm_inputs;
    norm_cmd->add_option("--op", op,
                         "one of unary_to_boolean, to_tmnf, to_binary_query, make_acyclic, "
                         "decompose, eliminate_desc, eliminate_root_leaf")
        ->required();
    norm_cmd->add_option("inputs", norm_inputs, ".mdl file(s)")->required();
    add_common(norm_cmd);

    // compile
    auto* comp_cmd = app.add_subcommand("compile", "compile a query to automata files");
    std::string target = "a_no", out_prefix = "out";
    comp_cmd->add_option("query", qpath, ".mdl file")->required();
    comp_cmd->add_option("--target", target, "a_yes, a_no, or ata");
    comp_cmd->add_option("-o,--output", out_prefix, "output path prefix");
    add_common(comp_cmd);

    // contain
    auto* cont_cmd = app.add_subcommand("contain", "decide query containment");
    std::string q1path, q2path, witness_out, stats_out;
    bool both_routes = false;
    cont_cmd->add_option("query1", q1path, ".mdl file")->required();
    cont_cmd->add_option("query2", q2path, ".mdl file")->required();
    cont_cmd->add_option("--witness-out", witness_out, "write the witness tree here");
    cont_cmd->add_option("--stats-out", stats_out, "write key=value stats here");
    cont_cmd->add_flag("--both-routes", both_routes, "cross-build the No-automaton both ways");
    add_common(cont_cmd);

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive containment check up to a size");
    int max_nodes = 6;
    oracle_cmd->add_option("query1", q1path, ".mdl file")->required();
    oracle_cmd->add_option("query2", q2path, ".mdl file")->required();
    oracle_cmd->add_option("--max-nodes", max_nodes, "largest tree size to enumerate");
    add_common(oracle_cmd);

    // tpct-gen
    auto* gen_cmd = app.add_subcommand("tpct-gen", "tiling instance -> query pair files");
    std::string ipath;
    bool pure_child = false;
    gen_cmd->add_option("instance", ipath, ".tpct file")->required();
    gen_cmd->add_option("-o,--output", out_prefix, "output path prefix");
    gen_cmd->add_flag("--pure-child", pure_child, "also eliminate root/leaf");

    // tpct-check
    auto* chk_cmd = app.add_subcommand("tpct-check", "game solver vs containment pipeline");
    chk_cmd->add_option("instance", ipath, ".tpct file")->required();
    add_common(chk_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2; help exits 0
    }

    ContainmentOptions opts;
    opts.max_states = max_states;
    opts.max_sigma_n = max_sigma_n;
    opts.both_routes = both_routes;

    if (eval_cmd->parsed()) {
        std::string qtext = slurp(qpath), ttext = slurp(tpath);
        AlphabetPtr alpha;
        if (!common.alpha_path.empty()) {
            alpha = parse_alphabet(slurp(common.alpha_path));
        } else {
            std::set<std::string> labels;
            scan_query_labels(qtext, labels);
            scan_tree_labels(ttext, labels);
            alpha = make_alphabet({labels.begin(), labels.end()});
        }
        SchemaKind schema = schema_from_name(common.schema);
        DatalogQuery q = parse_query(qtext, schema, alpha);
        LabeledTree t = parse_tree(ttext, alpha);
        if (q.mode == QueryMode::Boolean) {
            std::cout << (eval_boolean(q, t) ? "YES" : "NO") << "\n";
        } else {
            auto nodes = eval_unary(q, t);
            if (nodes.empty()) {
                std::cout << "NONE\n";
            } else {
                bool first = true;
                for (int v : nodes) {
                    std::cout << (first ? "" : " ") << v;
                    first = false;
                }
                std::cout << "\n";
            }
        }
        return 0;
    }

    if (norm_cmd->parsed()) {
        SchemaKind schema = schema_from_name(common.schema);
        std::vector<std::string> texts;
        for (const auto& p : norm_inputs) texts.push_back(slurp(p));
        AlphabetPtr alpha = common.alphabet(texts);
        std::vector<DatalogQuery> qs;
        for (const auto& t : texts) qs.push_back(parse_query(t, schema, alpha));
        auto print_result = [](const RewriteResult& r) {
            std::cout << r.query.to_text();
            for (const auto& line : r.log) std::cout << "# " << line << "\n";
        };
        if (op == "eliminate_root_leaf") {
            if (qs.size() != 2)
                throw validation_error("eliminate_root_leaf takes two query files");
            auto [r1, r2] = eliminate_root_leaf(qs[0], qs[1]);
            print_result(r1);
            std::cout << "----\n";
            print_result(r2);
            return 0;
        }
        if (qs.size() != 1) throw validation_error("this rewriting takes one query file");
        RewriteResult r;
        if (op == "unary_to_boolean") r = unary_to_boolean(qs[0]);
        else if (op == "to_tmnf") r = to_tmnf(qs[0]);
        else if (op == "to_binary_query") r = to_binary_query(qs[0]);
        else if (op == "make_acyclic") r = make_acyclic(qs[0]);
        else if (op == "decompose") r = decompose_query(qs[0]);
        else if (op == "eliminate_desc") r = eliminate_desc(qs[0]);
        else throw validation_error("unknown rewriting '" + op + "'");
        print_result(r);
        return 0;
    }

    if (comp_cmd->parsed()) {
        SchemaKind schema = schema_from_name(common.schema);
        std::string qtext = slurp(qpath);
        AlphabetPtr alpha = common.alphabet({qtext});
        DatalogQuery q = parse_query(qtext, schema, alpha);
        // bring the query to Boolean normal form on encoded binary trees
        if (q.schema == SchemaKind::TauURootLeafDesc || q.schema == SchemaKind::TauGKChildDesc)
            q = eliminate_desc(q).query;
        if (q.mode == QueryMode::Unary) q = unary_to_boolean(q).query;
        if (q.schema != SchemaKind::TauB) q = to_binary_query(to_tmnf(q).query).query;
        if (target == "ata") {
            spit(out_prefix + ".ata", build_2ata(q).to_text());
            std::cout << "wrote " << out_prefix << ".ata\n";
        } else if (target == "a_yes") {
            Nbta a = build_a_yes(q, max_states);
            spit(out_prefix + ".nbta", a.to_text());
            std::cout << "wrote " << out_prefix << ".nbta (" << a.num_states << " states)\n";
        } else if (target == "a_no") {
            Nbta a = build_a_no(q, max_sigma_n, max_states);
            spit(out_prefix + ".nbta", a.to_text());
            std::cout << "wrote " << out_prefix << ".nbta (" << a.num_states << " states)\n";
        } else {
            throw validation_error("unknown target '" + target + "'");
        }
        return 0;
    }

    if (cont_cmd->parsed()) {
        SchemaKind mode = schema_from_name(common.schema);
        std::string t1 = slurp(q1path), t2 = slurp(q2path);
        AlphabetPtr alpha = common.alphabet({t1, t2});
        DatalogQuery q1 = parse_query(t1, mode, alpha);
        DatalogQuery q2 = parse_query(t2, mode, alpha);
        ContainmentVerdict v = decide_containment(q1, q2, mode, opts);
        std::cout << (v.contained ? "CONTAINED" : "NOT_CONTAINED") << "\n";
        for (const auto& [k, val] : v.stats) std::cout << k << "=" << val << "\n";
        if (v.witness_tree) {
            std::string text = tree_to_text(*v.witness_tree);
            std::cout << "witness=" << text << "\n";
            if (v.witness_node) std::cout << "witness_node=" << *v.witness_node << "\n";
            if (!witness_out.empty()) spit(witness_out, text + "\n");
        }
        write_stats(stats_out, v);
        return v.contained ? 0 : 1;
    }

    if (oracle_cmd->parsed()) {
        SchemaKind mode = schema_from_name(common.schema);
        std::string t1 = slurp(q1path), t2 = slurp(q2path);
        AlphabetPtr alpha = common.alphabet({t1, t2});
        DatalogQuery q1 = parse_query(t1, mode, alpha);
        DatalogQuery q2 = parse_query(t2, mode, alpha);
        OracleOutcome o = bounded_oracle(q1, q2, max_nodes, mode);
        if (o.counterexample_found) {
            std::cout << "COUNTEREXAMPLE " << tree_to_text(o.tree);
            if (o.node >= 0) std::cout << " node " << o.node;
            std::cout << "\n";
            return 1;
        }
        std::cout << "NO_COUNTEREXAMPLE_UP_TO " << max_nodes << "\n";
        return 0;
    }

    if (gen_cmd->parsed()) {
        TpctInstance inst = parse_tpct(slurp(ipath));
        TpctQueries qs = pure_child ? eliminate_root_leaf_pair(inst) : build_queries(inst);
        spit(out_prefix + "_q1.mdl", qs.q1.to_text());
        spit(out_prefix + "_q2.mdl", qs.q2.to_text());
        std::string alpha;
        for (const auto& s : qs.alphabet->symbols()) alpha += s + "\n";
        spit(out_prefix + ".alpha", alpha);
        std::cout << "wrote " << out_prefix << "_q1.mdl, " << out_prefix << "_q2.mdl, "
                  << out_prefix << ".alpha (schema "
                  << schema_name(qs.q1.schema) << ")\n";
        return 0;
    }

    if (chk_cmd->parsed()) {
        TpctInstance inst = parse_tpct(slurp(ipath));
        GameVerdict game = solve_game(inst);
        TpctQueries qs = build_queries(inst);
        ContainmentVerdict cv = decide_containment(qs.q1, qs.q2, SchemaKind::TauURootLeaf, opts);
        bool p1 = game.winner == Player::One;
        std::cout << "game_winner=" << (p1 ? "player1" : "player2") << "\n";
        std::cout << "containment=" << (cv.contained ? "contained" : "not_contained") << "\n";
        bool agree = p1 == !cv.contained;
        std::cout << (agree ? "AGREE" : "DISAGREE") << "\n";
        return agree ? 0 : 1;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError& e) {
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
