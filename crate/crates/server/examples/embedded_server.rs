//! Run the HTTP API in-process and drive it like the UI would.
//!
//!     cargo run -p anameter-server --example embedded_server
//!
//! Pass `--listen` to keep serving on 127.0.0.1:8080 afterwards.

use std::net::SocketAddr;
use std::sync::Arc;

use anameter::TaxonomyRegistry;
use anameter_server::{bind, serve, store::Change, Store};

#[tokio::main]
async fn main() {
    let dir = std::env::temp_dir().join("anameter-embedded-example");
    let _ = std::fs::remove_dir_all(&dir);
    let store = Arc::new(Store::open(&dir, TaxonomyRegistry::default()).unwrap());

    let created = store
        .create("anameter", "Demo", "hana", anameter::Mode::Adaptability)
        .unwrap();
    println!("created {} at revision {}", created.id, created.revision);

    let mark = |ae: &str| Change::Mark {
        sub_aspect: "presentation-aspects".into(),
        sub_factor: "perceptual-motor-abilities".into(),
        aspect_element: ae.into(),
        factor_element: "myopia".into(),
        checked: true,
    };
    let out = store
        .patch(&created.id, 1, &[mark("text-type-size"), mark("background-type-colour")])
        .unwrap();
    println!("patched to revision {}", out.current.revision);

    let stale = store.patch(&created.id, 1, &[mark("images-type-size")]).unwrap_err();
    println!("second writer on revision 1: {stale}");

    if std::env::args().any(|a| a == "--listen") {
        let listener = bind(SocketAddr::from(([127, 0, 0, 1], 8080))).await.unwrap();
        println!("try: curl http://127.0.0.1:8080/api/evaluations/{}", created.id);
        serve(listener, store, None).await.unwrap();
    }
}
