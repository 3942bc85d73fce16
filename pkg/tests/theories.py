"""Random small ground default theories, written as DSL text."""

import random


def _lit(rng, atoms):
    return ("-" if rng.random() < 0.3 else "") + rng.choice(atoms)


def random_theory(seed, max_defaults=8, max_atoms=20, naf=False):
    rng = random.Random(seed)
    atoms = [f"p{i}" for i in range(rng.randint(3, min(10, max_atoms)))]
    lines = [f"#predicate {', '.join(a + '/0' for a in atoms)}."]
    for a in rng.sample(atoms, rng.randint(1, 3)):
        lines.append(f"{'-' if rng.random() < 0.2 else ''}{a}.")
    for k in range(rng.randint(0, 4)):
        body = ", ".join(_lit(rng, atoms) for _ in range(rng.randint(1, 2)))
        lines.append(f"@i{k} {body} => {_lit(rng, atoms)}.")
    for k in range(rng.randint(1, max_defaults)):
        parts = [_lit(rng, atoms) for _ in range(rng.randint(0, 2))]
        if naf and parts and rng.random() < 0.3:
            parts[-1] = "not " + parts[-1]
        constraint = f" [{_lit(rng, atoms)}]" if rng.random() < 0.5 else ""
        lines.append(f"@d{k} {', '.join(parts)} : {_lit(rng, atoms)}{constraint}.")
    return "\n".join(lines) + "\n"
