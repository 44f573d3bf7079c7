fn main() {
    println!("quext");
}
