mod support;

use proptest::prelude::*;

use support::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn budget_is_spent_exactly(case in run_case()) {
        check_budget_exactness(&case)?;
    }

    #[test]
    fn incumbent_never_worsens(case in run_case()) {
        check_monotone_incumbent(&case)?;
    }

    #[test]
    fn evaluations_stay_in_the_box(case in run_case()) {
        check_box_containment(&case)?;
    }

    #[test]
    fn runs_are_reproducible(case in run_case()) {
        check_seed_determinism(&case)?;
    }

    #[test]
    fn marginal_cdfs_are_monotone(case in history_case()) {
        check_cdf_monotonicity(&case)?;
    }

    #[test]
    fn normalization_ignores_affine_maps(case in affine_case()) {
        check_affine_invariance(&case)?;
    }
}
