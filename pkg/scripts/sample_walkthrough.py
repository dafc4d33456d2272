"""Nine-call toy dataset, end to end: priors, conditionals, scores, threshold, survivors, tree."""

import math
from fractions import Fraction

from robustcall import bayes, noise, tree
from robustcall.model import AttributeSchema, Dataset

ROWS = [
    (("Fri[S1]", "Office", "Meeting", "Friend"), "Reject"),
    (("Fri[S1]", "Office", "Meeting", "Colleague"), "Reject"),
    (("Fri[S1]", "Office", "Meeting", "Boss"), "Accept"),
    (("Fri[S1]", "Office", "Meeting", "Friend"), "Reject"),
    (("Fri[S2]", "Home", "Dinner", "Friend"), "Accept"),
    (("Wed[S1]", "Office", "Seminar", "Unknown"), "Reject"),
    (("Wed[S1]", "Office", "Seminar", "Colleague"), "Reject"),
    (("Wed[S1]", "Office", "Seminar", "Mother"), "Accept"),
    (("Wed[S2]", "Home", "Dinner", "Unknown"), "Accept"),
]
SCHEMA = AttributeSchema(
    ("DayTime", "Location", "Situation", "Relationship"),
    (("Fri[S1]", "Fri[S2]", "Wed[S1]", "Wed[S2]"), ("Office", "Home"),
     ("Meeting", "Seminar", "Dinner"), ("Friend", "Colleague", "Boss", "Mother", "Unknown")),
    ("Reject", "Accept"),
)


def main() -> None:
    ds = Dataset(SCHEMA, tuple(r for r, _ in ROWS), tuple(l for _, l in ROWS))
    model = bayes.fit(ds)
    print("priors:", {c: str(bayes.prior(model, c)) for c in SCHEMA.class_set})
    for a, dom in zip(SCHEMA.attributes, SCHEMA.domains):
        for v in dom:
            cells = ", ".join(f"{c}={bayes.conditional(model, a, v, c)}" for c in SCHEMA.class_set)
            print(f"  P({a}={v} | .): {cells}")

    rep = noise.detect_noise(ds)
    print("\nid  label   predicted  P(x|label)  status")
    for s in rep.scores:
        print(f"{s.instance_id:>2}  {s.true_label:<7} {s.predicted:<10} {Fraction(math.exp(s.score)).limit_denominator(1000)!s:<11} {s.status}")
    print(f"\nthreshold P = {Fraction(math.exp(rep.threshold)).limit_denominator(1000)}; "
          f"flagged: {list(rep.noise_ids)}")
    quality = noise.eliminate(ds, rep)
    print(f"{len(quality)} instances kept\n")
    print(tree.dumps_tree(tree.build_tree(quality)), end="")


if __name__ == "__main__":
    main()
