#include "heapinv/encode.hpp"

#include <algorithm>
#include <set>

#include "heapinv/typecheck.hpp"

namespace heapinv {

using namespace ast;

const char* to_string(EncodingBase b) {
    switch (b) {
    case EncodingBase::N: return "n";
    case EncodingBase::R: return "r";
    case EncodingBase::RW: return "rw";
    case EncodingBase::RWfun: return "rwfun";
    case EncodingBase::RWmem: return "rwmem";
    }
    return "?";
}

EncodingBase parse_encoding_base(std::string_view s) {
    if (s == "n")
        return EncodingBase::N;
    if (s == "r")
        return EncodingBase::R;
    if (s == "rw")
        return EncodingBase::RW;
    if (s == "rwfun")
        return EncodingBase::RWfun;
    if (s == "rwmem")
        return EncodingBase::RWmem;
    throw std::invalid_argument("unknown encoding '" + std::string(s) + "'");
}

namespace {

std::string fresh_name(const Program& p, const std::string& base) {
    if (!p.name_taken(base))
        return base;
    for (int i = 1;; ++i) {
        std::string n = base + "_" + std::to_string(i);
        if (!p.name_taken(n))
            return n;
    }
}

std::string declare(Program& p, const std::string& base, TypeTag t) {
    std::string n = fresh_name(p, base);
    p.vars.push_back({n, std::move(t), {}});
    return n;
}

ExprPtr add1(const std::string& v) { return binary(BinOp::Add, var(v), lit(1)); }
ExprPtr eq(ExprPtr a, ExprPtr b) { return binary(BinOp::Eq, std::move(a), std::move(b)); }
ExprPtr conj(ExprPtr a, ExprPtr b) { return binary(BinOp::And, std::move(a), std::move(b)); }

// 0 < p && p <= cnt_alloc
ExprPtr valid_addr(const std::string& p, const std::string& cnt_alloc) {
    return conj(binary(BinOp::Lt, lit(0), var(p)), binary(BinOp::Le, var(p), var(cnt_alloc)));
}

ExprPtr lower_expr(const ExprPtr& e) {
    return std::visit(
        [&](const auto& n) -> ExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NullLit>) {
                return lit(0);
            } else if constexpr (std::is_same_v<T, Unary>) {
                return unary(n.op, lower_expr(n.operand));
            } else if constexpr (std::is_same_v<T, Binary>) {
                return binary(n.op, lower_expr(n.lhs), lower_expr(n.rhs));
            } else if constexpr (std::is_same_v<T, CtorApp>) {
                std::vector<ExprPtr> args;
                for (const auto& a : n.args)
                    args.push_back(lower_expr(a));
                return ctor_app(n.ctor, std::move(args));
            } else if constexpr (std::is_same_v<T, Select>) {
                return select(n.selector, lower_expr(n.arg));
            } else if constexpr (std::is_same_v<T, IsCtor>) {
                return is_ctor(n.ctor, lower_expr(n.arg));
            } else {
                return e;
            }
        },
        e->node);
}

TypeTag lower_type(const TypeTag& t) { return t.is_addr() ? TypeTag::integer() : t; }

void check_source(const Program& p, bool needs_heap) {
    require_well_typed(p);
    if (needs_heap && !p.heap_adt())
        throw EncodingError("program declares no heap type");
    bool havoc = false, assigns_input = false;
    for_each_stmt(p.body, [&](const Stmt& s) {
        if (std::holds_alternative<Havoc>(s.node))
            havoc = true;
        if (auto* a = std::get_if<Assign>(&s.node); a && a->var == p.input_var)
            assigns_input = true;
    });
    bool seed_ref = false;
    for_each_stmt(p.body, [&](const Stmt& s) {
        for_each_stmt_expr(s, [&](const ExprPtr& e) {
            if (mentions_var(e, p.seed_var))
                seed_ref = true;
        });
        if (auto* a = std::get_if<Assign>(&s.node); a && a->var == p.seed_var)
            seed_ref = true;
    });
    if (havoc || seed_ref)
        throw EncodingError("program uses the seed variable '" + p.seed_var +
                            "' or havoc; encoders reserve the seed for their own havocs");
    if (assigns_input)
        throw EncodingError("program assigns to the input variable '" + p.input_var + "'");
}

class Rewriter {
public:
    Rewriter(const Program& src, const EncodingConfig& cfg) : src_(assign_locations(src)), cfg_(cfg) {}

    EncodedProgram run() {
        check_source(src_, true);
        for (const char* n : {"R", "W"})
            if (src_.find_pred(n))
                throw EncodingError(std::string("program already declares a predicate named ") + n);
        bool rw = cfg_.base != EncodingBase::R;
        out_ = src_;
        out_.body.clear();

        // phase 1: Addr becomes Int
        for (auto& v : out_.vars)
            v.type = lower_type(v.type);
        for (auto& a : out_.adts)
            for (auto& c : a.ctors)
                for (auto& f : c.fields)
                    f.type = lower_type(f.type);
        for (auto& d : out_.preds)
            for (auto& t : d.params)
                t = lower_type(t);

        // phase 2: auxiliary state
        TypeTag obj = TypeTag::object(*out_.heap_type);
        names_.cnt_alloc = declare(out_, "$cnt_alloc", TypeTag::integer());
        names_.cnt = declare(out_, "$cnt", TypeTag::integer());
        if (rw) {
            names_.cnt_last = declare(out_, "$cnt_last", TypeTag::integer());
            names_.t = declare(out_, "$t", TypeTag::integer());
        } else {
            names_.last = declare(out_, "$last", obj);
        }
        names_.last_addr = declare(out_, "$last_addr", TypeTag::integer());
        out_.prophecy_var = names_.last_addr;
        if (cfg_.tagging) {
            names_.last_loc = declare(out_, "$last_loc", TypeTag::integer());
            names_.loc = declare(out_, "$loc", TypeTag::integer());
        }
        if (cfg_.caching) {
            names_.lastc_addr = declare(out_, "$lastc_addr", TypeTag::integer());
            names_.lastc_data = declare(out_, "$lastc_data", obj);
        }
        if (needs_obj_temp(src_.body))
            names_.obj = declare(out_, "$obj", obj);

        names_.r_pred = "R";
        PredDecl r{"R", {TypeTag::integer(), TypeTag::integer(), rw ? TypeTag::integer() : obj}, {}};
        if (cfg_.tagging) {
            r.params.push_back(TypeTag::integer());
            r.params.push_back(TypeTag::integer());
        }
        out_.preds.push_back(r);
        if (rw) {
            names_.w_pred = "W";
            PredDecl w{"W", {TypeTag::integer(), TypeTag::integer(), obj}, {}};
            if (cfg_.tagging)
                w.params.push_back(TypeTag::integer());
            out_.preds.push_back(w);
        }

        Block body;
        body.push_back(Assign{names_.cnt_alloc, lit(0)});
        body.push_back(Assign{names_.cnt, lit(0)});
        if (rw) {
            body.push_back(Assign{names_.cnt_last, lit(0)});
            body.push_back(Assign{names_.t, lit(0)});
        } else {
            body.push_back(Assign{names_.last, def_obj()});
        }
        if (cfg_.tagging)
            body.push_back(Assign{names_.last_loc, lit(0)});
        if (cfg_.caching) {
            body.push_back(Assign{names_.lastc_addr, lit(0)});
            body.push_back(Assign{names_.lastc_data, def_obj()});
        }
        if (cfg_.base == EncodingBase::RW) {
            std::vector<ExprPtr> args{in(), lit(0), def_obj()};
            if (cfg_.tagging)
                args.push_back(lit(0));
            body.push_back(AssertPred{PredApp{"W", std::move(args)}});
        }

        // phase 3
        for (auto& s : rewrite(src_.body))
            body.push_back(std::move(s));
        out_.body = std::move(body);
        assign_locations_in_place(out_);
        require_well_typed(out_);
        return {std::move(out_), names_, cfg_, src_};
    }

private:
    Program src_;
    EncodingConfig cfg_;
    Program out_;
    IntroducedNames names_;

    ExprPtr in() const { return var(src_.input_var); }

    static bool needs_obj_temp(const Block& b) {
        bool need = false;
        for_each_stmt(b, [&](const Stmt& s) {
            if (auto* a = std::get_if<Alloc>(&s.node); a && mentions_var(a->init, a->var))
                need = true;
        });
        return need;
    }

    Stmt havoc(const std::string& v) const { return Havoc{v, cfg_.native_havoc}; }

    Block rewrite(const Block& b) {
        Block out;
        for (const auto& s : b)
            rewrite_stmt(s, out);
        return out;
    }

    void rewrite_stmt(const Stmt& s, Block& out) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Alloc>) {
                    alloc(n, s.loc, out);
                } else if constexpr (std::is_same_v<T, Read>) {
                    read(n, s.loc, out);
                } else if constexpr (std::is_same_v<T, Write>) {
                    write(n, s.loc, out);
                } else if constexpr (std::is_same_v<T, Assign>) {
                    out.push_back(Assign{n.var, lower_expr(n.value)});
                } else if constexpr (std::is_same_v<T, If>) {
                    out.push_back(If{lower_expr(n.cond), rewrite(n.then_branch), rewrite(n.else_branch)});
                } else if constexpr (std::is_same_v<T, While>) {
                    out.push_back(While{lower_expr(n.cond), rewrite(n.body)});
                } else if constexpr (std::is_same_v<T, Assume>) {
                    out.push_back(Assume{lower_expr(n.cond)});
                } else if constexpr (std::is_same_v<T, Assert>) {
                    if (cfg_.base == EncodingBase::RWmem && cfg_.strip_asserts)
                        out.push_back(Skip{});
                    else
                        out.push_back(Assert{lower_expr(n.cond)});
                } else if constexpr (std::is_same_v<T, AssumePred> || std::is_same_v<T, AssertPred>) {
                    PredApp app{n.app.pred, {}};
                    for (const auto& a : n.app.args)
                        app.args.push_back(lower_expr(a));
                    out.push_back(T{std::move(app)});
                } else {
                    out.push_back(n);
                }
            },
            s.node);
    }

    void cache_store(const std::string& p, ExprPtr value, Block& out) const {
        if (!cfg_.caching)
            return;
        out.push_back(Assign{names_.lastc_addr, var(p)});
        out.push_back(Assign{names_.lastc_data, std::move(value)});
    }

    void alloc(const Alloc& a, unsigned loc, Block& out) {
        ExprPtr e = lower_expr(a.init);
        if (mentions_var(e, a.var)) {
            out.push_back(Assign{names_.obj, e});
            e = var(names_.obj);
        }
        const std::string& p = a.var;
        out.push_back(Assign{names_.cnt_alloc, add1(names_.cnt_alloc)});
        out.push_back(Assign{p, var(names_.cnt_alloc)});
        bool rw = cfg_.base != EncodingBase::R;
        bool fun = cfg_.base == EncodingBase::RWfun || cfg_.base == EncodingBase::RWmem;
        if (!rw) {
            Block then;
            then.push_back(Assign{names_.last, e});
            if (cfg_.tagging)
                then.push_back(Assign{names_.last_loc, lit(loc)});
            out.push_back(If{eq(var(names_.last_addr), var(p)), std::move(then), {}});
        } else if (!fun || cfg_.fun_alloc_write) {
            out.push_back(Assign{names_.cnt, add1(names_.cnt)});
            std::vector<ExprPtr> args{in(), var(names_.cnt), e};
            if (cfg_.tagging)
                args.push_back(lit(loc));
            out.push_back(AssertPred{PredApp{"W", std::move(args)}});
            Block then;
            then.push_back(Assign{names_.cnt_last, var(names_.cnt)});
            if (cfg_.tagging)
                then.push_back(Assign{names_.last_loc, lit(loc)});
            out.push_back(If{eq(var(names_.last_addr), var(p)), std::move(then), {}});
        }
        cache_store(p, e, out);
    }

    void read(const Read& r, unsigned loc, Block& out) {
        const std::string& x = r.var;
        const std::string& p = r.addr;
        bool rw = cfg_.base != EncodingBase::R;
        out.push_back(Assign{names_.cnt, add1(names_.cnt)});
        if (cfg_.base == EncodingBase::RWmem)
            out.push_back(Assert{valid_addr(p, names_.cnt_alloc)});
        Block core;
        if (!rw) {
            std::vector<ExprPtr> hit{in(), var(names_.cnt), var(names_.last)};
            std::vector<ExprPtr> miss{in(), var(names_.cnt), var(x)};
            if (cfg_.tagging) {
                hit.push_back(var(names_.last_loc));
                hit.push_back(lit(loc));
                miss.push_back(var(names_.loc));
                miss.push_back(lit(loc));
            }
            Block then;
            then.push_back(AssertPred{PredApp{"R", std::move(hit)}});
            then.push_back(Assign{x, var(names_.last)});
            Block els;
            els.push_back(havoc(x));
            if (cfg_.tagging)
                els.push_back(havoc(names_.loc));
            els.push_back(AssumePred{PredApp{"R", std::move(miss)}});
            core.push_back(If{eq(var(names_.last_addr), var(p)), std::move(then), std::move(els)});
        } else {
            std::vector<ExprPtr> hit{in(), var(names_.cnt), var(names_.cnt_last)};
            std::vector<ExprPtr> miss{in(), var(names_.cnt), var(names_.t)};
            if (cfg_.tagging) {
                hit.push_back(var(names_.last_loc));
                hit.push_back(lit(loc));
                miss.push_back(var(names_.loc));
                miss.push_back(lit(loc));
            }
            Block then;
            then.push_back(AssertPred{PredApp{"R", std::move(hit)}});
            then.push_back(Assign{names_.t, var(names_.cnt_last)});
            if (cfg_.tagging)
                then.push_back(Assign{names_.loc, var(names_.last_loc)});
            Block els;
            els.push_back(havoc(names_.t));
            if (cfg_.tagging)
                els.push_back(havoc(names_.loc));
            els.push_back(AssumePred{PredApp{"R", std::move(miss)}});
            core.push_back(If{eq(var(names_.last_addr), var(p)), std::move(then), std::move(els)});
            core.push_back(havoc(x));
            std::vector<ExprPtr> wargs{in(), var(names_.t), var(x)};
            if (cfg_.tagging)
                wargs.push_back(var(names_.loc));
            core.push_back(AssumePred{PredApp{"W", std::move(wargs)}});
        }
        if (!cfg_.caching) {
            for (auto& s : core)
                out.push_back(std::move(s));
            return;
        }
        Block hit;
        hit.push_back(Assign{x, var(names_.lastc_data)});
        cache_store(p, var(x), core);
        out.push_back(If{eq(var(names_.lastc_addr), var(p)), std::move(hit), std::move(core)});
    }

    void write(const Write& w, unsigned loc, Block& out) {
        ExprPtr e = lower_expr(w.value);
        const std::string& p = w.addr;
        if (cfg_.base == EncodingBase::R) {
            Block then;
            then.push_back(Assign{names_.last, e});
            if (cfg_.tagging)
                then.push_back(Assign{names_.last_loc, lit(loc)});
            out.push_back(If{conj(eq(var(names_.last_addr), var(p)), valid_addr(p, names_.cnt_alloc)), std::move(then),
                             {}});
            if (cfg_.caching) {
                Block store;
                cache_store(p, e, store);
                out.push_back(If{valid_addr(p, names_.cnt_alloc), std::move(store), {}});
            }
            return;
        }
        out.push_back(Assign{names_.cnt, add1(names_.cnt)});
        Block valid;
        std::vector<ExprPtr> args{in(), var(names_.cnt), e};
        if (cfg_.tagging)
            args.push_back(lit(loc));
        valid.push_back(AssertPred{PredApp{"W", std::move(args)}});
        Block track;
        track.push_back(Assign{names_.cnt_last, var(names_.cnt)});
        if (cfg_.tagging)
            track.push_back(Assign{names_.last_loc, lit(loc)});
        valid.push_back(If{eq(var(names_.last_addr), var(p)), std::move(track), {}});
        cache_store(p, e, valid);
        Block invalid;
        if (cfg_.base == EncodingBase::RWmem)
            invalid.push_back(Assert{lit(0)});
        out.push_back(If{valid_addr(p, names_.cnt_alloc), std::move(valid), std::move(invalid)});
    }
};

void map_pred_apps(Block& b, const std::function<void(PredApp&)>& f) {
    for (auto& s : b) {
        if (auto* a = std::get_if<AssertPred>(&s.node))
            f(a->app);
        else if (auto* u = std::get_if<AssumePred>(&s.node))
            f(u->app);
        else if (auto* i = std::get_if<If>(&s.node)) {
            map_pred_apps(i->then_branch, f);
            map_pred_apps(i->else_branch, f);
        } else if (auto* w = std::get_if<While>(&s.node)) {
            map_pred_apps(w->body, f);
        }
    }
}

}  // namespace

Program enc_n(const Program& src) {
    check_source(src, false);
    Program p = assign_locations(src);
    std::string c = declare(p, "$c", TypeTag::integer());
    p.fuel_var = c;
    std::function<Block(const Block&)> go = [&](const Block& b) {
        Block out;
        for (const auto& s : b) {
            if (std::holds_alternative<Alloc>(s.node) || std::holds_alternative<Read>(s.node) ||
                std::holds_alternative<Write>(s.node)) {
                out.push_back(Assign{c, binary(BinOp::Sub, var(c), lit(1))});
                out.push_back(Assume{binary(BinOp::Ge, var(c), lit(0))});
                out.push_back(s);
            } else if (auto* i = std::get_if<If>(&s.node)) {
                out.push_back(If{i->cond, go(i->then_branch), go(i->else_branch)});
            } else if (auto* w = std::get_if<While>(&s.node)) {
                out.push_back(While{w->cond, go(w->body)});
            } else {
                out.push_back(s);
            }
        }
        return out;
    };
    p.body = go(p.body);
    assign_locations_in_place(p);
    return p;
}

EncodedProgram encode(const Program& p, const EncodingConfig& cfg) {
    EncodedProgram e;
    if (cfg.base == EncodingBase::N) {
        e.source = p;
        e.program = enc_n(p);
        e.names.fuel = *e.program.fuel_var;
        e.config = cfg;
        return e;
    }
    e = Rewriter(p, cfg).run();
    if (!cfg.scope_vars.empty())
        e = apply_scope_vars(e, cfg.scope_vars);
    if (!cfg.drop_args.empty())
        e = remove_arguments(e, cfg.drop_args);
    e.config = cfg;
    return e;
}

namespace {
EncodingConfig base_config(EncodingBase b) {
    EncodingConfig c;
    c.base = b;
    return c;
}
}  // namespace

EncodedProgram enc_r(const Program& p) { return encode(p, base_config(EncodingBase::R)); }
EncodedProgram enc_rw(const Program& p) { return encode(p, base_config(EncodingBase::RW)); }
EncodedProgram enc_rwfun(const Program& p, bool fun_alloc_write) {
    EncodingConfig c = base_config(EncodingBase::RWfun);
    c.fun_alloc_write = fun_alloc_write;
    return encode(p, c);
}
EncodedProgram enc_rwmem(const Program& p, bool strip_asserts) {
    EncodingConfig c = base_config(EncodingBase::RWmem);
    c.strip_asserts = strip_asserts;
    return encode(p, c);
}

EncodedProgram apply_tagging(const EncodedProgram& e) {
    EncodingConfig c = e.config;
    c.tagging = true;
    return encode(e.source, c);
}

EncodedProgram apply_caching(const EncodedProgram& e) {
    EncodingConfig c = e.config;
    c.caching = true;
    return encode(e.source, c);
}

EncodedProgram apply_scope_vars(const EncodedProgram& e, const std::vector<std::string>& vars) {
    if (vars.empty())
        return e;
    EncodedProgram out = e;
    auto* decl = const_cast<PredDecl*>(out.program.find_pred(out.names.r_pred));
    if (!decl)
        throw EncodingError("encoding has no R predicate");
    for (const auto& v : vars) {
        const VarDecl* d = out.source.find_var(v);
        if (!d)
            throw EncodingError("unknown scope variable '" + v + "'");
        if (!d->type.is_int())
            throw EncodingError("scope variable '" + v + "' must be Int");
        decl->params.push_back(TypeTag::integer());
    }
    map_pred_apps(out.program.body, [&](PredApp& app) {
        if (app.pred != out.names.r_pred)
            return;
        for (const auto& v : vars)
            app.args.push_back(var(v));
    });
    for (const auto& v : vars)
        out.config.scope_vars.push_back(v);
    require_well_typed(out.program);
    return out;
}

EncodedProgram remove_arguments(const EncodedProgram& e, const std::map<std::string, std::vector<std::size_t>>& drop) {
    EncodedProgram out = e;
    for (const auto& [pred, idx] : drop) {
        auto* decl = const_cast<PredDecl*>(out.program.find_pred(pred));
        if (!decl)
            throw EncodingError("unknown predicate '" + pred + "'");
        std::set<std::size_t> gone(idx.begin(), idx.end());
        for (auto i : gone)
            if (i >= decl->params.size())
                throw EncodingError("invalid argument index " + std::to_string(i) + " for " + pred + " of arity " +
                                    std::to_string(decl->params.size()));
        auto keep = [&](auto& vec) {
            std::decay_t<decltype(vec)> kept;
            for (std::size_t i = 0; i < vec.size(); ++i)
                if (!gone.count(i))
                    kept.push_back(vec[i]);
            vec = std::move(kept);
        };
        keep(decl->params);
        map_pred_apps(out.program.body, [&](PredApp& app) {
            if (app.pred == pred)
                keep(app.args);
        });
        auto& cfg_idx = out.config.drop_args[pred];
        cfg_idx.insert(cfg_idx.end(), idx.begin(), idx.end());
    }
    require_well_typed(out.program);
    return out;
}

std::map<std::string, std::vector<std::size_t>> parse_drop_spec(std::string_view spec) {
    std::map<std::string, std::vector<std::size_t>> out;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        auto comma = spec.find(',', pos);
        auto item = spec.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        auto colon = item.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == item.size())
            throw std::invalid_argument("malformed drop spec '" + std::string(item) + "', expected PRED:INDEX");
        std::string pred(item.substr(0, colon));
        std::size_t idx = 0;
        for (char c : item.substr(colon + 1)) {
            if (c < '0' || c > '9')
                throw std::invalid_argument("malformed index in '" + std::string(item) + "'");
            idx = idx * 10 + static_cast<std::size_t>(c - '0');
        }
        out[pred].push_back(idx);
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace heapinv
