"""Follow one singular family through both mappings and print where it lands."""

from painleve4d import laurent

for case in ("a2a2", "a5"):
    rep = laurent.push_orbit(case, "q1=eps", case=case)
    print(f"{case}: {rep.verdict_text}")
    for n, step in enumerate(rep.steps):
        label = f"C{step.blowup_label}" if step.blowup_label else "generic"
        print(f"  {n}: orders {step.leading_orders}  dim {step.component_dimension}  {label}")
    print(f"  constants recovered after confinement: {', '.join(rep.recovered_constants)}")
