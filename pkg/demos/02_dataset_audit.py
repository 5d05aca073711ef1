# %% [markdown]
# # Auditing the bundled fixtures
#
# Ground both property suites over the fixture datasets, look at the
# counterexamples and export one property to SMT-LIB.

# %%
from tdlaudit import check_grounded, emit_smtlib, explain, fixture_path, run_audit
from tdlaudit.audit import render_text
from tdlaudit.dataset import default_bindings, load_config, load_dataset
from tdlaudit.suites import ground_suite

# %%
for suite in ("compas", "loan"):
    report = run_audit(fixture_path(f"{suite}_fixture.csv"), fixture_path(f"{suite}.cfg"), suite)
    print(render_text(report, timing=False))

# %% [markdown]
# Row 7 of the recidivism fixture has decile score 1 and a positive outcome.

# %%
cfg = load_config(fixture_path("compas.cfg"))
data = load_dataset(fixture_path("compas_fixture.csv"), cfg)
grounded = ground_suite("compas", data, default_bindings("compas", cfg))
b = grounded["b"]
print(explain(check_grounded(b), b).render())

# %% [markdown]
# The SMT-LIB export asserts the negated property, so `sat` from a solver
# means the property is violated.

# %%
print(emit_smtlib(b, inline_thresholds=True)[:600])
