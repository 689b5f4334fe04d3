/*
Copyright 2026 The xinpaint Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef XINPAINT_CORE_ERROR_HPP_
#define XINPAINT_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace xinpaint {

// Base class of every error raised by the toolkit. The command-line front end
// maps these to exit status 1; anything else is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read, or written.
class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& cause)
      : Error(path + ": " + cause), path_(path), cause_(cause) {}

  const std::string& path() const { return path_; }
  const std::string& cause() const { return cause_; }

 private:
  std::string path_;
  std::string cause_;
};

// File was readable but its contents violate the expected format.
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// External metric plug-in failed. The excerpt holds the first bytes of what
// the plug-in printed, for diagnosis.
class PluginError : public Error {
 public:
  PluginError(const std::string& plugin, const std::string& message,
              const std::string& excerpt)
      : Error("plugin '" + plugin + "': " + message +
              (excerpt.empty() ? std::string() : " [output: " + excerpt + "]")),
        plugin_(plugin),
        excerpt_(excerpt) {}

  const std::string& plugin() const { return plugin_; }
  const std::string& excerpt() const { return excerpt_; }

 private:
  std::string plugin_;
  std::string excerpt_;
};

}  // namespace xinpaint

#endif  // XINPAINT_CORE_ERROR_HPP_
