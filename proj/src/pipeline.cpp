// Copyright 2026 The ESI Reconstruction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "esi/pipeline.hpp"

#include <exception>
#include <thread>

namespace esi
{
namespace
{
class FirstError
{
public:
  void capture()
  {
    std::lock_guard lock(mutex_);
    if (!error_) {
      error_ = std::current_exception();
    }
  }
  void rethrow_if_any() const
  {
    if (error_) {
      std::rethrow_exception(error_);
    }
  }

private:
  std::mutex mutex_;
  std::exception_ptr error_;
};
}  // namespace

void run_staged_pipeline(
  const BatchSource & source, Reconstructor & reconstructor, const FrameSink & sink,
  std::optional<Timestamp> t_end, std::size_t depth)
{
  Channel<EventBatch> batches(depth);
  Channel<Frame> frames(depth * 4);
  FirstError error;

  auto abort_all = [&] {
    batches.close();
    frames.close();
  };

  std::jthread ingest([&] {
    try {
      while (auto batch = source()) {
        if (!batches.push(std::move(*batch))) {
          break;
        }
      }
    } catch (...) {
      error.capture();
      abort_all();
    }
    batches.close();
  });

  std::jthread reconstruct([&] {
    try {
      auto forward = [&](std::vector<Frame> && out) {
        for (Frame & f : out) {
          if (!frames.push(std::move(f))) {
            return false;
          }
        }
        return true;
      };
      bool open = true;
      while (open) {
        auto batch = batches.pop();
        if (!batch) {
          break;
        }
        open = forward(reconstructor.process_events(*batch));
      }
      if (open && t_end) {
        forward(reconstructor.finish(*t_end));
      }
    } catch (...) {
      error.capture();
      abort_all();
    }
    frames.close();
  });

  try {
    while (auto f = frames.pop()) {
      sink(std::move(*f));
    }
  } catch (...) {
    error.capture();
    abort_all();
  }
  ingest.join();
  reconstruct.join();
  error.rethrow_if_any();
}

}  // namespace esi
