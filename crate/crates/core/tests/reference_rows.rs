mod common;

use prefplan::momdp::{pareto_dominates, Momdp, ValueVector};
use prefplan::order::Dominance;
use prefplan::product::build_product;
use prefplan::report::{compare_rows, ReportRow, SolutionReport};
use prefplan::scenarios::{build_garden_mini, garden_pdfa};

use common::{garden_r_by_hand, mat_vec, max_abs_diff, REFERENCE_ROWS};

/// A difference of two values printed to two decimals is only known to
/// within 0.01, so gaps up to two rounding units count as ties.
const ROUNDING_EPS: f64 = 0.02;

fn reference_report() -> SolutionReport {
    SolutionReport {
        classes: ["p1", "p2", "p3", "p4"].map(String::from).to_vec(),
        rows: REFERENCE_ROWS
            .iter()
            .map(|(w, v, p)| ReportRow {
                weight: w.to_vec(),
                value: v.to_vec(),
                outcomes: p.to_vec(),
                duplicate_of: None,
            })
            .collect(),
    }
}

#[test]
fn product_reachability_matches_hand_closures() {
    let (mdp, pdfa) = build_garden_mini("3x3").unwrap();
    let momdp = Momdp::new(build_product(&mdp, &pdfa).unwrap());
    assert_eq!(momdp.reachability_matrix(), garden_r_by_hand());
    assert_eq!(garden_pdfa().unwrap().reachability().matrix(), garden_r_by_hand());
}

#[test]
fn every_row_satisfies_the_identity_to_rounding() {
    for (k, (_, v, p)) in REFERENCE_ROWS.iter().enumerate() {
        let gap = max_abs_diff(&mat_vec(&garden_r_by_hand(), p), v);
        assert!(gap <= 0.011, "row {}: {gap}", k + 1);
        let lib = prefplan::momdp::apply(&garden_pdfa().unwrap().reachability().matrix(), p);
        assert!(max_abs_diff(&lib, v) <= 0.011);
    }
}

#[test]
fn printed_weights_lie_on_the_simplex_to_rounding() {
    for (k, (w, _, p)) in REFERENCE_ROWS.iter().enumerate() {
        assert!((w.iter().sum::<f64>() - 1.0).abs() <= 0.011, "row {} weights", k + 1);
        assert!((p.iter().sum::<f64>() - 1.0).abs() <= 0.011, "row {} outcomes", k + 1);
        assert!(w.iter().all(|&x| x > 0.0));
    }
}

#[test]
fn rows_are_pairwise_nondominated_up_to_rounding() {
    for (i, a) in REFERENCE_ROWS.iter().enumerate() {
        for (j, b) in REFERENCE_ROWS.iter().enumerate() {
            let d = pareto_dominates(&ValueVector(a.1.to_vec()), &ValueVector(b.1.to_vec()), ROUNDING_EPS).unwrap();
            assert_eq!(d, Dominance::Neither, "rows {} and {}", i + 1, j + 1);
        }
    }
}

#[test]
fn strict_comparison_sees_rounding_artifacts() {
    // Rows 8 and 6 print identically except v_p2 (0.73 vs 0.72).
    let v = |k: usize| ValueVector(REFERENCE_ROWS[k - 1].1.to_vec());
    assert_eq!(pareto_dominates(&v(8), &v(6), 1e-9).unwrap(), Dominance::Dominates);
    assert_eq!(pareto_dominates(&v(4), &v(10), 1e-9).unwrap(), Dominance::Dominates);
}

#[test]
fn both_routes_agree_on_the_reference_rows() {
    let order = garden_pdfa().unwrap().induced_order();
    let c = compare_rows(&reference_report(), Some(&order), ROUNDING_EPS).unwrap();
    assert!(c.dominated_rows.is_empty(), "{c}");
    let s = c.stochastic.as_ref().unwrap();
    for i in 0..REFERENCE_ROWS.len() {
        for j in 0..REFERENCE_ROWS.len() {
            assert_eq!(s[i][j], Dominance::Neither, "rows {} and {}", i + 1, j + 1);
        }
    }
}
