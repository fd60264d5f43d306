#pragma once

#include <array>
#include <string>
#include <vector>

#include "plkit/geometry.hpp"

namespace plkit {

// Curves: JSON array of [re, im] pairs.
std::string curve_to_json(const JordanCurve& c);
JordanCurve curve_from_json(const std::string& text);
// Accepts a single curve or an array of curves.
std::vector<JordanCurve> curves_from_json(const std::string& text);
std::string curves_to_json(const std::vector<JordanCurve>& cs);

// Grids: {"rect": [[re,im],[re,im]], "nx", "ny", "cells": base64 bitmask}
// with row-major cells, bit k of byte k/8 set LSB first.
std::string grid_to_json(const GridSet& g);
GridSet grid_from_json(const std::string& text);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

using Rgb = std::array<std::uint8_t, 3>;

// One pixel per cell, top row = largest imaginary part.
struct Render {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;
};

Render render_grid(const GridSet& g, Rgb on = {0, 0, 0}, Rgb off = {255, 255, 255});
void draw_curve(Render& r, const GridSet& shape, const JordanCurve& c, Rgb color);
void write_ppm(const std::string& path, const Render& r);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace plkit
