//! Shared fixtures for unit tests.

use crate::model::{Corpus, Query, Region};

pub fn region(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Region {
    Region::new(xmin, ymin, xmax, ymax).unwrap()
}

/// Three-object fixture used throughout the unit tests.
///
/// Token ids resolve to t1=0, t2=1, t3=2, t4=3, t5=4 and weights to
/// w(t1)=w(t2)=ln 1.5, w(t3)=w(t4)=w(t5)=ln 3.
///
/// On the 2x2 grid over [0,100]^2 the cell counts are
/// cell0=2, cell1=1, cell2=1, cell3=2, so the global grid order is
/// [cell1, cell2, cell0, cell3].
pub fn fixture_corpus() -> Corpus {
    Corpus::from_records(vec![
        (1, region(10.0, 10.0, 50.0, 50.0), vec!["t1", "t2"]),
        (2, region(20.0, 20.0, 60.0, 60.0), vec!["t1", "t2", "t3"]),
        (3, region(60.0, 60.0, 100.0, 100.0), vec!["t4", "t5"]),
    ])
    .unwrap()
}

/// The fixture query: region [10,10,50,50], tokens {t1,t2,t3},
/// tau_r = 0.25, tau_t = 0.3. Its answers are objects 1 and 2.
pub fn fixture_query(corpus: &Corpus) -> Query {
    corpus
        .query(
            region(10.0, 10.0, 50.0, 50.0),
            &["t1".into(), "t2".into(), "t3".into()],
            0.25,
            0.3,
        )
        .unwrap()
}

/// The space the fixture's grid examples use: [0,100]^2.
pub fn fixture_space() -> Region {
    region(0.0, 0.0, 100.0, 100.0)
}
