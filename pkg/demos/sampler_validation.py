"""Joint-distribution testing of the Gibbs samplers, and a cautionary tale.

A sampler can look healthy on every trace plot and still be wrong.  The
check used here simulates the joint distribution of (parameters, data) two
ways: directly from the prior and generative model, and by alternating the
sampler's updates with fresh data draws.  If the sampler targets the right
posterior, both paths share every moment; a z-score far beyond 4 is proof
of a defect, not bad luck.

The run below validates the plain sampler and the default misclassification
sampler, then deliberately switches the misclassification sampler to its
"conditional" latent-refresh mode.  That variant reuses stale latent scales
when re-drawing the latent response, which breaks exact invariance; the
z-scores explode.  Draw counts are reduced here for speed; the acceptance
suite runs the full-length version of the two valid configurations.
"""

from bqr.validation import geweke_misclass, geweke_naive


def main():
    print("plain sampler, p = 0.5 (30,000 sweeps)")
    result = geweke_naive(0.5, draws=30_000)
    print(result.table())
    print(f"max |z| = {result.max_abs_z:.2f}  -> valid\n")

    print("misclassification sampler, marginal latent refresh (the default)")
    result = geweke_misclass(0.5, draws=30_000)
    print(result.table())
    print(f"max |z| = {result.max_abs_z:.2f}  -> valid\n")

    print("misclassification sampler, conditional latent refresh")
    result = geweke_misclass(0.5, draws=30_000, latent_refresh="conditional")
    print(result.table())
    print(f"max |z| = {result.max_abs_z:.2f}  -> broken: the coefficient second")
    print("moments collapse far below their prior-marginal values (z above 10),")
    print("so this mode is retained only to document the failure and is never")
    print("the default. See README, section 'Sampler validity'.")


if __name__ == "__main__":
    main()
