// Flat-file formats: datasets, distance-matrix CSV, embeddings, histograms.
// All numbers are written with "%.17g" so identical runs produce identical
// bytes.
#pragma once

#include <string>

#include "shapedist/analysis.hpp"
#include "shapedist/pipeline.hpp"

namespace shapedist {

std::string format_double(double x);

void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& path);

void write_distance_matrix_csv(const std::string& path,
                               const DistanceMatrix& dm);
DistanceMatrix read_distance_matrix_csv(const std::string& path);

void write_embedding_csv(const std::string& path, const Embedding& e);

void write_histogram_csv(const std::string& path, const HistogramSpec& h,
                         const std::string& comment = "");

}  // namespace shapedist
