//! Regenerate the shipped scenario files from the built-in definitions.
//! Usage: `cargo run -p hodgekit --example dump_fixtures [OUT_DIR]`

use hodgekit::scenario::fixtures;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "fixtures".into());
    std::fs::create_dir_all(&out).expect("create output directory");
    for s in [fixtures::h1_orbit(), fixtures::remark25()] {
        let path = format!("{}/{}.json", out, s.name);
        std::fs::write(&path, s.to_json() + "\n").expect("write fixture");
        println!("wrote {path}");
    }
}
