//! Combine noisy partitions through a co-association matrix.

use mvec::ensemble::{accumulate_coassociation, consensus};
use mvec::metrics::nmi;
use mvec::rng::substream;
use mvec::{LinkageKind, NmiNormalization, Partition};
use rand::Rng;

fn main() -> mvec::Result<()> {
    let (n, k) = (40, 4);
    let truth = Partition::from_labels((0..n).map(|i| i % k).collect());
    let mut rng = substream(3, 0);

    // Each ensemble member relabels about a quarter of the objects at random.
    let members: Vec<Partition> = (0..100)
        .map(|_| {
            let labels = truth
                .labels()
                .iter()
                .map(|&l| if rng.random_bool(0.25) { rng.random_range(0..k) } else { l })
                .collect();
            Partition::from_labels(labels)
        })
        .collect();

    let mean: f64 = members
        .iter()
        .map(|p| nmi(p, &truth, NmiNormalization::Geometric))
        .sum::<mvec::Result<f64>>()?
        / members.len() as f64;

    let ca = accumulate_coassociation(&members)?;
    println!("objects 0 and 4 together in {}/{} members", ca.count(0, 4), ca.n_partitions());
    println!("objects 0 and 1 together in {}/{} members", ca.count(0, 1), ca.n_partitions());

    let agreed = consensus(&ca, k, LinkageKind::Average)?;
    println!("mean member nmi: {mean:.4}");
    println!("consensus nmi:   {:.4}", nmi(&agreed, &truth, NmiNormalization::Geometric)?);
    Ok(())
}
