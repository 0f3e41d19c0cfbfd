//! Write a feature matrix as FVEC and CSV, then load both back.
//!
//! ```text
//! cargo run -p mvec --example feature_files
//! ```

use mvec::features::encode_csv;
use mvec::{load_features, save_features, FeatureFormat, FeatureMatrix};

fn main() -> mvec::Result<()> {
    let m = FeatureMatrix::from_rows(&[[0.25, -1.0, 3.5], [1.0, 0.0, 0.125], [2.0, 2.0, 2.0]])?;
    let dir = std::env::temp_dir().join(format!("mvec-feature-files-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| mvec::Error::Io { path: dir.clone(), source: e })?;

    let fvec = dir.join("embeddings.fvec");
    let csv = dir.join("embeddings.csv");
    save_features(&m, &fvec, FeatureFormat::Fvec)?;
    save_features(&m, &csv, FeatureFormat::Csv)?;

    // Loading sniffs the FVEC magic, so the extension does not matter.
    let a = load_features(&fvec)?;
    let b = load_features(&csv)?;
    assert_eq!(a, m);
    assert_eq!(b, m);

    println!("{} rows x {} dims", a.rows(), a.dims());
    print!("{}", encode_csv(&a));
    println!("l2-normalized first row: {:?}", a.l2_normalized().row(0));

    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
