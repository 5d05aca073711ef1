# %% [markdown]
# # Formulas, finite models and bounded theorem checks
#
# Parse a few temporal deontic formulas, evaluate them on small models and
# run the theorem checker over every short trace.

# %%
from tdlaudit import Bounds, KripkeModel, TraceModel, check_validity, evaluate, evaluate_trace, parse_formula
from tdlaudit.norms import render_report, theorem_report, validate_theorem

# %% [markdown]
# Formulas print back in the same surface syntax they are parsed from.

# %%
f = parse_formula("[](!fair(x) U fair(x))")
print(f)

# %% [markdown]
# A trace where fairness arrives at the third step.  `O` looks at deontic
# successors only, so a state without any is vacuously obliged.

# %%
t = TraceModel([set(), set(), {"fair"}], ro={0: [2]})
for k in range(3):
    print(k, evaluate_trace(t, k, {}, parse_formula("!fair U fair")), evaluate_trace(t, k, {}, parse_formula("O(fair)")))

# %% [markdown]
# General Kripke models allow branching time.

# %%
m = KripkeModel(3, {(0, 1), (0, 2)}, {(0, 2)}, [{"p"}, set(), {"q"}])
print(evaluate(m, 0, {}, parse_formula("<>q & !([]p) & P(q)")))

# %% [markdown]
# Validity up to bounds: every trace of up to three states is tried.

# %%
print(check_validity([], parse_formula("O(p) -> !P(!p)"), Bounds(3, ("p",))))
cex = check_validity([], parse_formula("O(p) -> P(p)"), Bounds(3, ("p",)))
print(cex.describe())

# %% [markdown]
# The theorem report; counterexamples are findings about the axioms, not failures.

# %%
print(render_report(theorem_report()), end="")
print(validate_theorem("T7").counterexample.describe())
