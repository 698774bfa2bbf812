#include "bdiv/plot.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace bdiv {

namespace {

constexpr double kSize = 520.0;
constexpr double kCenter = kSize / 2;
constexpr double kRadius = 210.0;

const char* piece_color(std::size_t index)
{
    static const char* palette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                    "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};
    return palette[index % (sizeof(palette) / sizeof(palette[0]))];
}

std::string num(double value)
{
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    return buffer;
}

double ray_angle(const VectorZ& ray)
{
    return std::atan2(ray(1).convert_to<double>(), ray(0).convert_to<double>());
}

std::string svg_open(const std::string& title)
{
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << int(kSize) << "\" height=\""
        << int(kSize) << "\" viewBox=\"0 0 " << int(kSize) << " " << int(kSize) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"12\" y=\"24\" font-family=\"monospace\" font-size=\"14\">" << title
        << "</text>\n";
    return out.str();
}

void radial_line(std::ostringstream& out, double angle, const char* color, double width)
{
    out << "<line x1=\"" << num(kCenter) << "\" y1=\"" << num(kCenter) << "\" x2=\""
        << num(kCenter + kRadius * std::cos(angle)) << "\" y2=\""
        << num(kCenter - kRadius * std::sin(angle)) << "\" stroke=\"" << color
        << "\" stroke-width=\"" << num(width) << "\"/>\n";
}

std::string functional_label(const VectorQ& functional)
{
    std::ostringstream out;
    out << "(";
    for (Eigen::Index i = 0; i < functional.size(); ++i) {
        if (i) out << ", ";
        out << format_rat(functional(i));
    }
    out << ")";
    return out.str();
}

}  // namespace

std::string svg_pl_pieces(const std::vector<LinearPiece>& pieces)
{
    std::ostringstream out;
    out << svg_open("certified linear pieces: " + std::to_string(pieces.size()));
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const LinearPiece& piece = pieces[i];
        if (piece.cone.ambient_dim() != 2 || piece.cone.rays().size() < 1) continue;
        const char* color = piece_color(i);
        double first = ray_angle(piece.cone.rays().front());
        double last = ray_angle(piece.cone.rays().back());
        radial_line(out, first, color, 2.0);
        radial_line(out, last, color, 2.0);
        double mid = (first + last) / 2;
        out << "<text x=\"" << num(kCenter + (kRadius * 0.55) * std::cos(mid)) << "\" y=\""
            << num(kCenter - (kRadius * 0.55) * std::sin(mid))
            << "\" font-family=\"monospace\" font-size=\"11\" fill=\"" << color << "\">"
            << functional_label(piece.functional) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_chord_evidence(const NonPLEvidence& evidence)
{
    std::ostringstream out;
    out << svg_open("distinct chord functionals: " + std::to_string(evidence.functionals.size()));
    for (std::size_t i = 0; i < evidence.rays.size(); ++i) {
        const VectorQ& ray = evidence.rays[i];
        if (ray.size() != 2) continue;
        double angle = std::atan2(ray(1).convert_to<double>(), ray(0).convert_to<double>());
        radial_line(out, angle, piece_color(i), 1.2);
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_walk_distance(const WalkReport& report)
{
    std::ostringstream out;
    out << svg_open("walk distance to target, log-log");
    const double left = 70, right = kSize - 30, top = 50, bottom = kSize - 60;

    std::vector<std::pair<double, double>> points;
    for (const WalkCheckpoint& cp : report.checkpoints) {
        if (cp.n <= 0) continue;
        Enclosure d2 = cp.distance_squared.enclose(48);
        double distance = std::sqrt(((d2.lo + d2.hi) / 2).convert_to<double>());
        if (distance <= 0) continue;
        points.emplace_back(std::log10(double(cp.n)), std::log10(distance));
    }
    if (points.size() < 2) {
        out << "<text x=\"12\" y=\"48\" font-family=\"monospace\" font-size=\"12\">"
            << "not enough checkpoints</text>\n</svg>\n";
        return out.str();
    }
    double x0 = points.front().first, x1 = points.back().first;
    double y0 = points.front().second, y1 = points.front().second;
    for (const auto& [x, y] : points) {
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;

    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * (right - left); };
    auto sy = [&](double y) { return bottom - (y - y0) / (y1 - y0) * (bottom - top); };

    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
        << num(right - left) << "\" height=\"" << num(bottom - top)
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    out << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(kSize - 24)
        << "\" font-family=\"monospace\" font-size=\"12\">log10 n</text>\n";
    out << "<text x=\"14\" y=\"" << num((top + bottom) / 2)
        << "\" font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 14 "
        << num((top + bottom) / 2) << ")\">log10 d</text>\n";

    out << "<polyline fill=\"none\" stroke=\"#4e79a7\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : points) out << num(sx(x)) << "," << num(sy(y)) << " ";
    out << "\"/>\n";
    for (const auto& [x, y] : points) {
        out << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y))
            << "\" r=\"3\" fill=\"#e15759\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace bdiv
