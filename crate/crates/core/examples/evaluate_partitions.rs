//! Score predicted labels against ground truth.

use mvec::metrics::{contingency, nmi, purity};
use mvec::{NmiNormalization, Partition};

fn main() -> mvec::Result<()> {
    // Class names can be any hashable token.
    let truth = Partition::from_tokens(["cat", "cat", "cat", "dog", "dog", "dog", "owl", "owl"]);
    let pred = Partition::from_labels(vec![1, 1, 0, 0, 0, 0, 2, 2]);

    let table = contingency(&pred, &truth)?;
    println!("contingency (rows = predicted clusters):");
    for row in table.rows() {
        println!("  {row:?}");
    }
    for norm in [NmiNormalization::Geometric, NmiNormalization::Arithmetic] {
        println!("nmi ({norm}): {:.4}", nmi(&pred, &truth, norm)?);
    }
    println!("purity: {:.4}", purity(&pred, &truth)?);

    // Relabeling clusters changes nothing.
    let renamed = Partition::from_labels(pred.labels().iter().map(|l| (l + 1) % 3).collect());
    assert!(renamed.same_grouping(&pred));
    assert_eq!(purity(&renamed, &truth)?, purity(&pred, &truth)?);
    Ok(())
}
