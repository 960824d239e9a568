//! LIBSVM text parsing, label normalization, subsetting, and round-trip
//! serialization.
//!
//! ```text
//! cargo run --example libsvm_io [path/to/dataset.libsvm]
//! ```

use std::io::Cursor;

use zocoon::data::{load_libsvm, parse_libsvm};
use zocoon::rng::RngStream;

fn main() -> zocoon::Result<()> {
    let dataset = match std::env::args().nth(1) {
        Some(path) => load_libsvm(&path, None)?,
        None => {
            // covtype-style {1,2} labels normalize to {+1,-1}
            let text = "\
1 1:0.5 3:2 7:-1.5
2 2:1 4:1e-3   # comment
1 1:1

2 5:2.5e2
";
            parse_libsvm(Cursor::new(text), "inline-demo", None)?
        }
    };
    println!(
        "{}: {} examples, dimension {}",
        dataset.name(),
        dataset.len(),
        dataset.dimension()
    );
    let positives = dataset.examples().iter().filter(|e| e.label() > 0.0).count();
    println!("labels: {positives} positive / {} negative", dataset.len() - positives);

    let mut rng = RngStream::new(42);
    let n = dataset.len().min(3);
    let sub = dataset.subset(n, &mut rng)?;
    println!("random subset of {n}, serialized back to text:");
    print!("{}", sub.serialize_to_string());

    // Round trip is exact.
    let reparsed = parse_libsvm(
        Cursor::new(sub.serialize_to_string()),
        sub.name(),
        Some(sub.dimension()),
    )?;
    assert_eq!(reparsed.examples(), sub.examples());
    println!("round trip: parse(serialize(subset)) identical");
    Ok(())
}
