//! `NLBC(Maj_n⊕)` for odd `n`.

use std::time::Instant;

use nlbox_core::f2linalg::Elimination;
use nlbox_core::nlbc::{maj_table, MajTableOptions};

#[test]
fn maj_table_up_to_thirteen() {
    let rows = maj_table(&[3, 5, 7, 9, 11, 13], &MajTableOptions::default()).unwrap();
    let values: Vec<(usize, usize)> = rows.iter().map(|r| (r.n, r.nlbc)).collect();
    assert_eq!(values, vec![(3, 2), (5, 14), (7, 26), (9, 254), (11, 494), (13, 1090)]);
}

#[test]
fn elimination_strategies_agree_on_maj11() {
    for strategy in [Elimination::Plain, Elimination::FourRussians { k: 6 }, Elimination::Auto] {
        let opts = MajTableOptions { strategy: Some(strategy), ..Default::default() };
        assert_eq!(maj_table(&[11], &opts).unwrap()[0].nlbc, 494, "{strategy:?}");
    }
}

#[test]
fn maj_table_fifteen() {
    let start = Instant::now();
    let opts = MajTableOptions { allow_15: true, ..Default::default() };
    assert_eq!(maj_table(&[15], &opts).unwrap()[0].nlbc, 1818);
    assert!(start.elapsed().as_secs() <= 15 * 60);
}
