//! Documents in and out of the command-line format.

use drw::cli::{self, Document, Payload};
use drw::{Context, Form};

fn main() {
    let ctx = Context::new(3, 1, 3).unwrap();
    let a = Form::var(&ctx, 0).verschiebung().unwrap();
    let doc = Document::new(ctx, Payload::Form(a));
    let text = doc.to_text();
    println!("{text}");
    assert_eq!(Document::parse(&text).unwrap(), doc);

    let mut out = Vec::new();
    let code = cli::run(["drw", "d", "--raw"], &mut text.as_bytes(), &mut out, &mut std::io::stderr());
    print!("d -> exit {code}: {}", String::from_utf8_lossy(&out));

    let bad = r#"{"v":1,"p":3,"n":1,"m":3,"form":[{"c":[1,0],"k":[[3,1]],"I":[]}]}"#;
    let mut err = Vec::new();
    let code = cli::run(["drw", "d"], &mut bad.as_bytes(), &mut std::io::sink(), &mut err);
    print!("non-canonical weight -> exit {code}: {}", String::from_utf8_lossy(&err));
}
