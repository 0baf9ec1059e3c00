use std::path::PathBuf;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("cargo sets the manifest dir");
    let header = PathBuf::from(&crate_dir).join("include").join("rotdisc.h");
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(header);
        }
        Err(e) => {
            // Leave the previous header in place; the header-freshness test
            // fails if the surface actually drifted.
            println!("cargo:warning=header generation skipped: {e}");
        }
    }
}
