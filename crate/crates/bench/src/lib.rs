//! Seeded synthetic networks, indicator sets and planning instances for
//! benchmarks and randomized tests.

use imt_core::model::*;
use imt_core::planner::{ActionCatalog, AsIs, CellResolution, IndicatorPackage, MaturityStep};
use imt_core::scoring::{DcAggregation, ScoringConfig};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A network of `orgs` internal organizations, one external group and
/// `links` links with random matrices.
pub fn network(rng: &mut impl Rng, orgs: usize, links: usize) -> CollaborationNetwork {
    let mut organizations: Vec<Organization> = (0..orgs)
        .map(|i| Organization {
            id: format!("o{i}").into(),
            name: format!("Org {i}"),
            external: false,
            maturity: Some(MaturityRating::new(
                "LISI",
                MaturityLevel::new(rng.gen_range(1..=5)).unwrap(),
            )),
        })
        .collect();
    organizations.push(Organization {
        id: "citizens".into(),
        name: "Citizens".into(),
        external: true,
        maturity: None,
    });
    let processes: Vec<ProcessNode> = (0..orgs)
        .flat_map(|i| {
            ["a", "b"].map(|s| ProcessNode {
                id: format!("p{i}{s}").into(),
                name: format!("process {i}{s}"),
                organization: format!("o{i}").into(),
                kind: ProcessKind::Elementary,
                children: vec![],
                exposed_services: vec![],
            })
        })
        .collect();
    let links = (0..links)
        .map(|i| {
            let pair: Vec<_> = processes.choose_multiple(rng, 2).collect();
            InteropLink {
                id: format!("l{i}").into(),
                from_node: pair[0].id.clone(),
                to_node: pair[1].id.clone(),
                mechanism: "ETL".into(),
                compatibility: CompatibilityMatrix::from_bits(rng.gen::<u32>() & ((1 << 24) - 1)),
            }
        })
        .collect();
    CollaborationNetwork {
        id: "net".into(),
        name: "random".into(),
        granularity: Granularity::Quarterly,
        approach: None,
        organizations,
        processes,
        links,
    }
}

/// A rate in [0, 1], hitting both ends now and then.
pub fn rate(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen(),
    }
}

pub fn indicators(rng: &mut impl Rng) -> IndicatorSet {
    IndicatorSet::new(rate(rng), rate(rng), rate(rng)).unwrap()
}

pub fn weights(rng: &mut impl Rng) -> WeightVector {
    loop {
        let w = [0, 1, 2].map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..5.0) });
        if let Ok(v) = WeightVector::new(w[0], w[1], w[2]) {
            return v;
        }
    }
}

pub fn config(rng: &mut impl Rng) -> ScoringConfig {
    let agg = if rng.gen_bool(0.25) {
        DcAggregation::Min
    } else {
        DcAggregation::Mean
    };
    ScoringConfig::new(weights(rng), agg)
}

/// A cost in effort units, a multiple of 0.5 so sums are exact.
pub fn cost(rng: &mut impl Rng) -> f64 {
    f64::from(rng.gen_range(1..=20u8)) * 0.5
}

/// An as-is state and a catalog of at most `max_actions` actions.
pub fn planning_instance(rng: &mut impl Rng, max_actions: usize) -> (AsIs, ActionCatalog) {
    let orgs = rng.gen_range(1..=3);
    let links = rng.gen_range(1..=3);
    let mut net = network(rng, orgs, links);
    // Keep matrices sparse enough that cell actions cover a real share.
    for link in &mut net.links {
        link.compatibility = CompatibilityMatrix::from_bits(rng.gen::<u32>() & rng.gen::<u32>() & 0xFF_FFFF);
    }
    let ind = IndicatorSet::new(rng.gen_range(0.3..1.0), rng.gen_range(0.3..1.0), rng.gen_range(0.2..1.0)).unwrap();
    let mut catalog = ActionCatalog::default();
    let mut budget = rng.gen_range(1..=max_actions);

    for org in net.internal_organizations() {
        let level = org.maturity.as_ref().unwrap().level.get();
        for from in level..5 {
            if budget == 0 || rng.gen_bool(0.3) {
                break;
            }
            catalog.maturity_actions.push(MaturityStep {
                organization: org.id.clone(),
                from_level: MaturityLevel::new(from).unwrap(),
                cost: cost(rng),
            });
            budget -= 1;
        }
    }
    let mut open: Vec<(LinkId, Cell)> = net
        .links
        .iter()
        .flat_map(|l| l.compatibility.open_cells().map(move |c| (l.id.clone(), c)))
        .collect();
    open.shuffle(rng);
    let packages = rng.gen_range(0..=budget.min(4));
    let cells = (budget - packages).min(open.len());
    for (link, cell) in open.into_iter().take(cells) {
        catalog.cell_actions.push(CellResolution {
            link,
            cell,
            cost: cost(rng),
        });
    }
    for i in 0..packages {
        let indicator = Indicator::ALL[rng.gen_range(0..3)];
        let current = ind.get(indicator);
        catalog.indicator_packages.push(IndicatorPackage {
            id: format!("pkg{i}"),
            indicator,
            new_value: rng.gen_range(current..=1.0),
            cost: cost(rng),
        });
    }
    (AsIs::new(net, ind), catalog)
}
