fn main() {
    println!("sphbt");
}
