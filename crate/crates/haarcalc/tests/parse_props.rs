use haarcalc::parse::{parse_expr, parse_positive_real};
use proptest::prelude::*;

fn arb_atom() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("R".to_string()),
        prop::sample::select(vec![2u64, 3, 5, 7, 11]).prop_map(|p| format!("Qp({p})")),
        prop::sample::select(vec![2u64, 3, 5, 7, 11]).prop_map(|p| format!("Zp({p})")),
        prop::sample::select(vec![2u64, 3, 4, 8, 9, 25]).prop_map(|q| format!("K({q})")),
        prop::sample::select(vec![2u64, 3, 4, 8, 9, 25]).prop_map(|q| format!("O({q})")),
        prop::sample::select(vec![2u64, 3, 4, 5, 8]).prop_map(|q| format!("Prufer({q})")),
        Just("Z".to_string()),
        Just("T".to_string()),
        (1u64..100).prop_map(|n| format!("Z/{n}")),
        prop::sample::select(vec!["A", "V", "Rd"]).prop_map(|l| format!("D({l})")),
    ]
}

fn arb_text() -> impl Strategy<Value = String> {
    prop::collection::vec((arb_atom(), 1u32..4, any::<bool>()), 0..6).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(a, k, spaced)| {
                let t = if k == 1 { a } else { format!("{a}^{k}") };
                if spaced {
                    format!(" {t} ")
                } else {
                    t
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    })
}

proptest! {
    #[test]
    fn print_parse_print_is_stable(text in arb_text()) {
        let x = parse_expr(&text).unwrap();
        let printed = x.to_string();
        let y = parse_expr(&printed).unwrap();
        prop_assert_eq!(&y, &x);
        prop_assert_eq!(y.to_string(), printed);
    }

    #[test]
    fn summand_order_is_irrelevant(a in arb_text(), b in arb_text()) {
        prop_assume!(!a.trim().is_empty() && !b.trim().is_empty());
        let ab = parse_expr(&format!("{a}+{b}")).unwrap();
        let ba = parse_expr(&format!("{b}+{a}")).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn positive_reals_round_trip(n in 1u64..500, d in 1u64..500, e in -3i64..4) {
        let text = if e == 0 { format!("{n}/{d}") } else { format!("{n}/{d}*c^{e}") };
        let x = parse_positive_real(&text).unwrap();
        prop_assert_eq!(parse_positive_real(&x.to_string()).unwrap(), x);
    }
}
