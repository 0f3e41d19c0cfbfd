//! k-means++ with Lloyd refinement on three well separated blobs.

use mvec::cluster::{kmeans_fit, KMeansConfig};
use mvec::metrics::{nmi, purity};
use mvec::synth::gaussian_blobs;
use mvec::NmiNormalization;

fn main() -> mvec::Result<()> {
    let centers = vec![vec![0.0, 0.0], vec![12.0, 0.0], vec![6.0, 10.0]];
    let (m, truth) = gaussian_blobs(&centers, 100, 1.0, 7)?;

    for seed in [0, 1, 2] {
        let fit = kmeans_fit(&m, &KMeansConfig::new(3).with_seed(seed))?;
        println!(
            "seed {seed}: inertia {:.3} after {} iterations (best restart {}), nmi {:.4}, purity {:.4}",
            fit.inertia,
            fit.iterations,
            fit.restart,
            nmi(&fit.partition, &truth, NmiNormalization::Geometric)?,
            purity(&fit.partition, &truth)?,
        );
        for (c, centroid) in fit.centroids.iter_rows().enumerate() {
            println!("  centroid {c}: [{:.2}, {:.2}]", centroid[0], centroid[1]);
        }
    }
    Ok(())
}
