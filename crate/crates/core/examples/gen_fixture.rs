//! Regenerates the bundled 50-tree fixture. Run after changing the
//! synthetic generator:
//!
//! ```sh
//! cargo run -p persuasion --example gen_fixture
//! ```

use std::io::Write;

use persuasion::synth::{generate_corpus, FIXTURE_SEED};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/trees_50.jsonl");
    std::fs::create_dir_all(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures")).unwrap();
    let mut out = std::fs::File::create(path).unwrap();
    for record in generate_corpus(50, FIXTURE_SEED) {
        serde_json::to_writer(&mut out, &record).unwrap();
        out.write_all(b"\n").unwrap();
    }
    eprintln!("wrote {path}");
}
