//! Build dendrograms with each linkage and cut them at several levels.

use mvec::cluster::{linkage_features, LinkageKind};
use mvec::FeatureMatrix;

fn main() -> mvec::Result<()> {
    let points = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.2], [5.0, 5.0], [5.5, 5.0], [9.0, 0.0]];
    let m = FeatureMatrix::from_rows(&points)?;

    for linkage in [LinkageKind::Ward, LinkageKind::Average, LinkageKind::Complete] {
        let tree = linkage_features(&m, linkage);
        println!("{linkage}:");
        for merge in tree.merges() {
            println!(
                "  merge {:>2} + {:>2} at {:.3} -> size {}",
                merge.cluster_a, merge.cluster_b, merge.height, merge.new_size
            );
        }
        for k in [2, 3] {
            println!("  cut k={k}: {:?}", tree.cut(k)?.labels());
        }
    }
    Ok(())
}
