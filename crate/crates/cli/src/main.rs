use std::io::Write;

fn main() {
    let out = jsjkit::run(std::env::args_os());
    let mut stream: Box<dyn Write> = if out.code == 2 { Box::new(std::io::stderr()) } else { Box::new(std::io::stdout()) };
    let _ = stream.write_all(out.output.as_bytes());
    std::process::exit(out.code);
}
