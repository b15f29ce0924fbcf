mod common;

use common::props;

macro_rules! property_tests {
    ($($name:ident),* $(,)?) => {
        $(#[test]
        fn $name() {
            props::$name().unwrap();
        })*
    };
}

property_tests!(
    closed_form_is_location_scale_equivariant,
    constant_summaries_give_zero_sd,
    summaries_ignore_sample_order,
    summaries_are_affine_equivariant,
    normal_quantile_is_antisymmetric,
    normal_quantile_is_monotone,
    gamma_satisfies_recurrence,
    accepted_set_is_the_closest,
    posterior_probs_normalize_and_ignore_distance_scale,
);
