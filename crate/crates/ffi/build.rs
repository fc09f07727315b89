fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let bindings = cbindgen::generate(&crate_dir).expect("Failed to generate bindings");
    bindings.write_to_file(format!("{crate_dir}/include/ising_storage.h"));
}
