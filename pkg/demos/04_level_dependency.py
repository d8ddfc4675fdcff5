"""Why chained level hypervectors generalize and orthogonal ones do not.

One feature, ten levels. Levels 1..5 train class 1, levels 6..9 train
class 2, and the query sits at the never-seen level 10. With chained
levels (the flip construction) the query is still closer to the class-2
encoder, so classification extrapolates. With mutually independent random
level vectors the query carries no information and the decision is a coin
flip.
"""

from hvdesign import appendix_experiment

TRIALS = 500

print(f"{TRIALS} trials per configuration, query at unseen level 10\n")
print(f"{'D':>6}  {'chained':>8}  {'orthogonal':>10}")
for dim in (64, 256, 1024):
    chained = appendix_experiment(dim, TRIALS, "chained", seed=0)
    orthogonal = appendix_experiment(dim, TRIALS, "orthogonal", seed=0)
    print(f"{dim:>6}  {chained:>8.3f}  {orthogonal:>10.3f}")

print("\nchained mode approaches 1.0 as D grows; orthogonal mode stays near 0.5.")
