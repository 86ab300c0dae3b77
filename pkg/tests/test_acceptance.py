"""The nine acceptance criteria, each at its stated tolerance."""
import time

from conftest import five_node_model, record
from alcomega import syntax as sx
from alcomega.harness import (
    alcoi_model, check_collapse, check_encoding, check_lift, check_linearity, check_set_terms,
)
from alcomega.hypersets import (
    bisimulation_partition, is_transitive, parse_equations, quotient, solve_equations, transitive_closure,
)
from alcomega.dltrans import lift_model, translate_kb_T
from alcomega.random_gen import corpus, random_graph, random_model, random_query
from alcomega.reasoner import Conflict, Entailed, NotEntailed, decide
from alcomega.search import SearchConfig, required_nodes
from alcomega.semantics import check_kb, check_query, eval_concept
from alcomega.syntax import parse_concept, parse_kb, parse_query

CORPUS = corpus(250, seed=0)


def timed(K, F, cfg):
    start = time.perf_counter()
    v = decide(K, F, cfg)
    return v, time.perf_counter() - start


def test_1_eagle_regression(eagle_kb):
    cfg = SearchConfig(6, "both")
    results = [timed(eagle_kb, parse_query(q), cfg) for q in ("CannotHunt(harry).", "Eagle [= CannotHunt.")]
    ok = all(isinstance(v, Entailed) and t < 1.0 for v, t in results)
    record(1, ok, "Entailed in " + ", ".join(f"{t:.3f}s" for _, t in results))
    assert ok


def test_2_reading_group_regression(reading_kb):
    cfg = SearchConfig(8, "both")
    times = []
    ok = True
    for q in ("(some has_paid . Fee)(bob).", "(some has_paid . Fee)(alice).",
              "ScienceGroup in some has_leader . Person."):
        v, t = timed(reading_kb, parse_query(q), cfg)
        ok &= isinstance(v, Entailed) and t < 5.0
        times.append(t)
    F = parse_query("(some has_paid . Fee)(carl).")
    v, t = timed(reading_kb, F, cfg)
    times.append(t)
    ok &= (isinstance(v, NotEntailed) and t < 5.0
           and check_kb(v.witness, reading_kb).satisfied and not check_query(v.witness, F))
    record(2, ok, "times " + ", ".join(f"{t:.3f}s" for t in times))
    assert ok


def test_3_pow_top_model_check():
    I = five_node_model()
    pow_top = eval_concept(I, parse_concept("Pow(Top)"))
    pow_bot = eval_concept(I, parse_concept("Pow(Bot)"))
    top = eval_concept(I, sx.TOP)
    ok = pow_top == {"p1", "p2"} and pow_top != top and pow_bot == {"a", "b", "c"}
    record(3, ok, f"Pow(Top) = {sorted(pow_top)}, Pow(Bot) = {sorted(pow_bot)}")
    assert pow_bot == {"a", "b", "c"}
    assert pow_top == {"p1", "p2"}


def test_4_non_extensionality():
    K = parse_kb("Eagle [= Aquila. Aquila [= Eagle. Eagle in RedListSpecies.")
    F = parse_query("Aquila in RedListSpecies.")
    v = decide(K, F, SearchConfig(6, "both"))
    ok = isinstance(v, NotEntailed) and len(v.witness) <= 4 and check_kb(v.witness, K).satisfied
    record(4, ok, f"witness with {len(v.witness) if isinstance(v, NotEntailed) else '-'} nodes")
    assert ok


def test_5_translation_transport():
    lifted = collapsed = 0
    problems = []
    for kb_seed, K in CORPUS:
        I = random_model(K, kb_seed, 5)
        if I is not None:
            ctx = translate_kb_T(K)
            if not check_kb(lift_model(I, ctx), ctx.kb, allow_alcoi=True).satisfied:
                problems.append(f"{kb_seed}: lifted model fails K^T")
            problems += check_lift(K, I)
            lifted += 1
        need = max(1, len(K.signature.individuals) + len(sx.membership_concepts(K.axioms)))
        if need <= 5:
            ctx, J = alcoi_model(K, max(need, 3), kb_seed)
            if J is not None:
                problems += check_collapse(K, ctx, J)
                collapsed += 1
    ok = not problems and lifted > 0 and collapsed > 0 and len(CORPUS) >= 200
    record(5, ok, f"{len(CORPUS)} KBs, {lifted} lifted, {collapsed} collapsed, {len(problems)} problems")
    assert ok, problems[:5]


def test_6_set_translation_transport():
    start = time.perf_counter()
    checked = 0
    problems = []
    for kb_seed, K in CORPUS:
        I = random_model(K, kb_seed, 5)
        if I is None:
            continue
        checked += 1
        problems += check_set_terms(K, I) + check_encoding(K, I)
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 60 and checked > 0
    record(6, ok, f"{checked} models, {len(problems)} problems, {elapsed:.1f}s")
    assert ok, problems[:5]


def test_7_cross_procedure_consistency():
    conflicts = []
    counts = {"Entailed": 0, "NotEntailed": 0, "Unknown": 0}
    for kb_seed, K in corpus(1000, seed=0):
        F = random_query(kb_seed, K)
        cfg = SearchConfig(max(6, required_nodes(K, F)), "both")
        try:
            v = decide(K, F, cfg)
        except Conflict as exc:
            conflicts.append(f"{kb_seed}: {exc}")
            continue
        counts[type(v).__name__] += 1
    record(7, not conflicts, f"{len(conflicts)} conflicts; {counts}")
    assert not conflicts, conflicts[:5]


def test_8_linearity():
    bad = [p for _, K in corpus(1000, seed=0) for p in check_linearity(K)]
    record(8, not bad, f"{len(bad)} violations over 1000 KBs")
    assert not bad, bad[:5]


def test_9_hyperset_kernel():
    problems = []
    wf = parse_equations("x1 = {x2, x3}\nx2 = {x3}\nx3 = {}\n")
    g, sol = solve_equations(wf)
    if not wf.well_founded or len(transitive_closure(g, sol["x1"])) != 2:
        problems.append("well-founded system")
    cyc = parse_equations("y = {e, y}\ne = {}\n")
    g, sol = solve_equations(cyc)
    if cyc.well_founded or len(g.nodes) != 2:
        problems.append("self-membership system")
    fig = parse_equations("y = { 'a', 'b', x }\nx = { 'b', y }\n")
    g, sol = solve_equations(fig)
    tc = {g.label(n) for n in transitive_closure(g, sol["y"])}
    if fig.well_founded or len(g.nodes) != 4 or tc != {"a", "b", "x", "y"} or is_transitive(g, {"y", "a", "b"}):
        problems.append("cyclic system with atoms")
    for seed in range(1000):
        q, _ = quotient(random_graph(seed))
        if not bisimulation_partition(q).is_identity():
            problems.append(f"graph {seed} not canonical")
    record(9, not problems, f"3 systems and 1000 graphs, {len(problems)} problems")
    assert not problems, problems[:5]
