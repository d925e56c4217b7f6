use proptest::prelude::*;
use proptest::sample::select;

use wreath_core::autgroup::color_aut_group;
use wreath_core::catalog::catalog;
use wreath_core::io::{parse_scheme, scheme_to_json};
use wreath_core::products::{direct_product, projection_morphism, wreath_product};
use wreath_core::tower::Tower;
use wreath_core::{check_morphism, validate, Scheme};

fn catalog_scheme() -> impl Strategy<Value = Scheme> {
    select(catalog().into_iter().map(|e| e.scheme).collect::<Vec<_>>())
}

fn relabeled(s: Scheme) -> impl Strategy<Value = (Scheme, Scheme)> {
    let n = s.size();
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(move |perm| (s.clone(), s.relabel_points(&perm).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relabeling_points_keeps_validity((s, t) in catalog_scheme().prop_flat_map(relabeled)) {
        prop_assert!(validate(t.matrix()).ok);
        prop_assert_eq!(s.valencies(), t.valencies());
        prop_assert_eq!(color_aut_group(&s).order_string(), color_aut_group(&t).order_string());
    }

    #[test]
    fn wreath_of_relabeled_factors_is_valid(
        (_, x) in catalog_scheme().prop_flat_map(relabeled),
        (_, y) in catalog_scheme().prop_flat_map(relabeled),
    ) {
        let w = wreath_product(&x, &y).unwrap();
        prop_assert!(validate(w.matrix()).ok);
        prop_assert_eq!(w.size(), x.size() * y.size());
        prop_assert_eq!(w.num_relations(), x.num_relations() + y.num_relations() - 1);
        let d = direct_product(&x, &y).unwrap();
        prop_assert_eq!(d.num_relations(), x.num_relations() * y.num_relations());
    }

    #[test]
    fn intersection_rows_sum_to_valencies(x in catalog_scheme(), y in catalog_scheme()) {
        let w = wreath_product(&x, &y).unwrap();
        let p = w.intersection_numbers().to_dense();
        let k = w.valencies();
        for i in 0..w.num_relations() {
            for kk in 0..w.num_relations() {
                let total: u64 = (0..w.num_relations()).map(|j| p[i][j][kk]).sum();
                prop_assert_eq!(total, k[i] as u64);
            }
        }
    }

    #[test]
    fn surjective_projections_have_surjective_index_maps(x in catalog_scheme(), y in catalog_scheme()) {
        let w = wreath_product(&x, &y).unwrap();
        let m = projection_morphism(&x, &y);
        prop_assert!(check_morphism(&w, &x, &m).unwrap());
        prop_assert!(m.is_point_surjective(x.size()));
        let mut hit = vec![false; x.num_relations()];
        for &l in &m.sigma {
            hit[l] = true;
        }
        prop_assert!(hit.into_iter().all(|h| h));
    }

    #[test]
    fn wreath_is_associative(x in catalog_scheme(), y in catalog_scheme(), z in catalog_scheme()) {
        let left = wreath_product(&wreath_product(&x, &y).unwrap(), &z).unwrap();
        let right = wreath_product(&x, &wreath_product(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn json_round_trip((_, s) in catalog_scheme().prop_flat_map(relabeled)) {
        prop_assert_eq!(parse_scheme(&scheme_to_json(&s)).unwrap(), s);
    }

    #[test]
    fn tower_projections_compose(n in 2usize..=5, m in 1usize..=5) {
        prop_assume!(m <= n);
        let t = Tower::kernel(3).unwrap();
        prop_assert_eq!(t.composite_morphism(n, m).unwrap(), t.direct_projection(n, m).unwrap());
    }
}
