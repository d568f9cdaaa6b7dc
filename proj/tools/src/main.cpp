#include <iostream>

#include "rmq_app/app.hpp"

int main(int argc, char** argv) { return rmq::app::run_cli(argc, argv, std::cout, std::cerr); }
